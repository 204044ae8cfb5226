"""Randomized invariant checks over channels, circuits and protocol runs.

Each check returns a :class:`CheckResult`. ``run_all`` drives the whole suite
and is what the ``validate`` command executes.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels as ch
from . import circuit as qc
from . import protocol as pr
from . import qasm, qstate

GRID_BETA_OMEGA = (0.25, 1.0, 2.0, 4.0)
GRID_GAMMA_DTAU = (0.1, 0.5, 1.0, 10.0)
REFERENCE_WORK = {
    (2, 0.5): 0.245,
    (2, 10.0): 0.226,
    (3, 0.5): 0.232,
    (3, 10.0): 0.212,
    (4, 0.5): 0.224,
    (4, 10.0): 0.206,
}
REFERENCE_DELTA_F = 0.186


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _random_bath_step(rng):
    bath = ch.BathParams(beta=rng.uniform(0.1, 5.0), gamma0=rng.uniform(0.1, 3.0))
    return ch.make_step_params(bath, rng.uniform(0.1, 4.0), rng.uniform(0.0, 5.0))


def check_kraus_completeness(rng, count=200) -> CheckResult:
    worst = 0.0
    for theta in rng.uniform(0, np.pi / 2, count):
        for ops in (ch.damping_kraus(theta), ch.pumping_kraus(theta)):
            worst = max(worst, np.max(np.abs(sum(k.conj().T @ k for k in ops) - np.eye(2))))
    return CheckResult("kraus completeness", worst <= 1e-12, f"{count} thetas, max dev {worst:.2e}")


def check_gibbs_fixed_point(rng, count=100) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        step = _random_bath_step(rng)
        gibbs = qstate.thermal_state(step.bath.beta, step.omega)
        worst = max(worst, np.max(np.abs(ch.apply_gadc(gibbs, step) - gibbs)))
    return CheckResult("gibbs fixed point", worst <= 1e-12, f"{count} draws, max dev {worst:.2e}")


def check_coherence_independence(rng, count=100) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        step = _random_bath_step(rng)
        p = rng.uniform()
        c1, c2 = (rng.uniform(0, np.sqrt(p * (1 - p))) * np.exp(1j * rng.uniform(0, 2 * np.pi)) for _ in range(2))
        r1 = np.array([[1 - p, c1], [np.conj(c1), p]])
        r2 = np.array([[1 - p, c2], [np.conj(c2), p]])
        d = abs(qstate.excited_population(ch.apply_gadc(r1, step)) - qstate.excited_population(ch.apply_gadc(r2, step)))
        worst = max(worst, d)
    return CheckResult("coherence independence", worst <= 1e-14, f"{count} pairs, max |dp_e| {worst:.2e}")


def check_population_recursion(rng, count=100) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        step = _random_bath_step(rng)
        rho = qstate.random_density_matrix(1, rng)
        p = rho[1, 1].real
        c2 = np.cos(step.theta) ** 2
        expected = p * c2 + step.p_up * (1 - c2)
        worst = max(worst, abs(qstate.excited_population(ch.apply_gadc(rho, step)) - expected))
    return CheckResult("population recursion", worst <= 1e-14, f"{count} states, max dev {worst:.2e}")


def check_contraction(rng, count=100) -> CheckResult:
    worst = -np.inf
    for _ in range(count):
        step = _random_bath_step(rng)
        a, b = qstate.random_density_matrix(1, rng), qstate.random_density_matrix(1, rng)
        gap = qstate.trace_distance(ch.apply_gadc(a, step), ch.apply_gadc(b, step)) - qstate.trace_distance(a, b)
        worst = max(worst, gap)
    return CheckResult("trace-distance contraction", worst <= 1e-12, f"{count} pairs, max growth {worst:.2e}")


def check_channel_lindblad_grid() -> CheckResult:
    worst = 0.0
    bath = ch.BathParams(1.0, 1.0)
    for bw in GRID_BETA_OMEGA:
        for gd in GRID_GAMMA_DTAU:
            step = ch.make_step_params(bath, bw, gd)
            diff = ch.gadc_superoperator(step) - ch.lindblad_superoperator(bw, bath, gd)
            worst = max(worst, np.max(np.abs(diff)))
    n = len(GRID_BETA_OMEGA) * len(GRID_GAMMA_DTAU)
    return CheckResult("channel = RK4 Lindblad", worst <= 1e-8, f"{n} grid points, max dev {worst:.2e}")


def check_dilations(rng, count=100) -> CheckResult:
    worst = 0.0
    for theta in rng.uniform(0, np.pi / 2, count):
        for build, kraus in ((qc.build_damping_stage, ch.damping_kraus), (qc.build_pumping_stage, ch.pumping_kraus)):
            got = qc.induced_superoperator(build(theta, 0, 1), 2)
            worst = max(worst, np.max(np.abs(got - ch.kraus_superoperator(kraus(theta)))))
    return CheckResult("damping/pumping dilation", worst <= 1e-12, f"{count} thetas, max dev {worst:.2e}")


def check_selector(rng, count=100) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        step = _random_bath_step(rng)
        got = qc.induced_superoperator(qc.build_fully_quantum_stage(step, 0, 1, 2), 3)
        worst = max(worst, np.max(np.abs(got - ch.kraus_superoperator(ch.gadc_kraus(step)))))
    return CheckResult("selector stage = GAD mixture", worst <= 1e-12, f"{count} draws, max dev {worst:.2e}")


def check_ancilla_modes(rng) -> CheckResult:
    worst = 0.0
    bath = ch.BathParams(1.0, 1.0)
    for n in range(1, 5):
        sched = pr.make_schedule(bath, 1.0, 2.0, n, rng.uniform(0.1, 3.0))
        steps = sched.step_params()
        p0 = qstate.thermal_populations(1.0, 1.0)[1]
        for prep in ("mixed", "coherent"):
            acc = qc.simulate(qc.fully_quantum_circuit(steps, p0, "accumulate", prep))
            rst = qc.simulate(qc.fully_quantum_circuit(steps, p0, "reset", prep))
            sys_acc = qstate.partial_trace(acc, range(1, 2 * n + 1))
            sys_rst = qstate.partial_trace(rst, [1, 2])
            worst = max(worst, np.max(np.abs(sys_acc - sys_rst)))
    return CheckResult("accumulate = reset ancillas", worst <= 1e-12, f"N=1..4, max dev {worst:.2e}")


def check_qasm_roundtrip(rng) -> CheckResult:
    worst = 0.0
    bath = ch.BathParams(1.0, 1.0)
    for n in (1, 2):
        sched = pr.make_schedule(bath, 1.0, 2.0, n, rng.uniform(0.1, 3.0))
        for sel in (None, "d" * n, "u" * n, "du"[:n]):
            circ = pr.process_circuit(sched, "accumulate", "coherent", sel)
            prog = qasm.parse_qasm(qasm.export_qasm(circ))
            worst = max(worst, qstate.trace_distance(qc.simulate(circ), prog.simulate()))
    return CheckResult("qasm round trip", worst <= 1e-12, f"max trace distance {worst:.2e}")


def check_mode_agreement() -> CheckResult:
    worst = 0.0
    bath = ch.BathParams(1.0, 1.0)
    for n in range(1, 5):
        for dtau in (0.5, 10.0):
            sched = pr.make_schedule(bath, 1.0, 2.0, n, dtau)
            ref = pr.run_exact(sched).mean_work
            for other in (pr.run_hybrid_enumerate(sched), pr.run_fully_quantum(sched, ancilla_mode="accumulate")):
                worst = max(worst, abs(other.mean_work - ref))
    return CheckResult("exact = hybrid = fully quantum", worst <= 1e-12, f"N<=4, both dtau, max dev {worst:.2e}")


def _random_schedule(rng):
    bath = ch.BathParams(beta=rng.uniform(0.2, 5.0), gamma0=rng.uniform(0.2, 3.0))
    a, b = rng.uniform(0.2, 4.0, 2)
    spacing = pr.SPACINGS[rng.integers(len(pr.SPACINGS))]
    return pr.make_schedule(bath, a, b, int(rng.integers(1, 12)), rng.uniform(0.0, 5.0), spacing)


def check_second_law(rng, count=200) -> CheckResult:
    worst = np.inf
    for _ in range(count):
        worst = min(worst, pr.run_exact(_random_schedule(rng)).extra_work)
    return CheckResult("second law W >= dF", worst >= -1e-12, f"{count} schedules, min extra work {worst:.2e}")


def check_quasi_static(rng, count=50) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        sched = _random_schedule(rng)
        sched = pr.Schedule(sched.bath, sched.omegas, 30.0 / sched.bath.gamma0 + rng.uniform(0, 5))
        w = np.asarray(sched.omegas)
        p_eq = 1.0 / (np.exp(sched.bath.beta * w[:-1]) + 1.0)
        worst = max(worst, abs(pr.run_exact(sched).mean_work - float(np.dot(np.diff(w), p_eq))))
    return CheckResult("quasi-static limit", worst <= 1e-6, f"{count} schedules at gamma0*dtau>=30, max dev {worst:.2e}")


def check_table(spacing: str = pr.DEFAULT_SPACING) -> CheckResult:
    bath = ch.BathParams(1.0, 1.0)
    worst = 0.0
    for (n, dtau), ref in REFERENCE_WORK.items():
        worst = max(worst, abs(pr.run_exact(pr.make_schedule(bath, 1.0, 2.0, n, dtau, spacing)).mean_work - ref))
    return CheckResult(f"reference exact work ({spacing} spacing)", worst <= 5e-4, f"max |dW| {worst:.2e}")


def check_free_energy() -> CheckResult:
    d_f = pr.free_energy_difference(pr.make_schedule(ch.BathParams(1.0, 1.0), 1.0, 2.0, 1, 0.0))
    return CheckResult("free energy difference", abs(d_f - REFERENCE_DELTA_F) <= 5e-4, f"dF = {d_f:.6f}")


def check_monte_carlo(rng, seeds=100, trajectories=4000) -> CheckResult:
    sched = pr.make_schedule(ch.BathParams(1.0, 1.0), 1.0, 2.0, 2, 0.5)
    ref = pr.run_exact(sched).mean_work
    misses = 0
    for seed in rng.integers(0, 2**31, seeds):
        mc = pr.run_hybrid_montecarlo(sched, trajectories, int(seed))
        misses += abs(mc.mean_work - ref) > 5 * mc.work_stderr
    return CheckResult("monte carlo within 5 sigma", misses <= 1, f"{misses}/{seeds} seeds outside")


def check_shot_noise(rng, seeds=100, shots=8192) -> CheckResult:
    sched = pr.make_schedule(ch.BathParams(1.0, 1.0), 1.0, 2.0, 2, 0.5)
    circ = qc.prefix(pr.process_circuit(sched, "accumulate"), 1)
    p = qstate.excited_population(qc.simulate(circ))
    bound = 5 * np.sqrt(p * (1 - p) / shots)
    misses = sum(abs(qc.sample_counts(circ, shots, int(s)).p_e_estimate - p) > bound for s in rng.integers(0, 2**31, seeds))
    return CheckResult("shot noise within 5 sigma", misses <= 1, f"{misses}/{seeds} seeds outside +-{bound:.4f}")


def suite(seed: int = 0) -> list[tuple[str, Callable[[], CheckResult]]]:
    rng = np.random.default_rng(seed)
    return [
        ("kraus", lambda: check_kraus_completeness(rng)),
        ("gibbs", lambda: check_gibbs_fixed_point(rng)),
        ("coherence", lambda: check_coherence_independence(rng)),
        ("recursion", lambda: check_population_recursion(rng)),
        ("contraction", lambda: check_contraction(rng)),
        ("lindblad", check_channel_lindblad_grid),
        ("dilation", lambda: check_dilations(rng)),
        ("selector", lambda: check_selector(rng)),
        ("ancilla", lambda: check_ancilla_modes(rng)),
        ("qasm", lambda: check_qasm_roundtrip(rng)),
        ("modes", check_mode_agreement),
        ("second-law", lambda: check_second_law(rng)),
        ("quasi-static", lambda: check_quasi_static(rng)),
        ("table", check_table),
        ("free-energy", check_free_energy),
        ("monte-carlo", lambda: check_monte_carlo(rng)),
        ("shots", lambda: check_shot_noise(rng)),
    ]


def run_all(seed: int = 0, report: Callable[[str], None] | None = print) -> list[CheckResult]:
    results = []
    for _, check in suite(seed):
        t0 = time.perf_counter()
        res = check()
        res.seconds = time.perf_counter() - t0
        if report is not None:
            report(res.line())
        results.append(res)
    return results
