"""The discrete-step isothermal process and its work accounting.

A run starts in the Gibbs state at ``omegas[0]``. Step ``j`` (1-based) is an
instantaneous quench ``omegas[j-1] -> omegas[j]`` costing
``(omegas[j] - omegas[j-1]) * p_e(t_{j-1})``, followed by an isochoric bath
contact of length ``delta_tau`` at ``omegas[j]``.

Four ways of running the isochoric steps are provided:

``exact``
    the GAD channel applied to the system density matrix;
``hybrid-enumerate``
    every damping/pumping branch string, weighted by its probability;
``hybrid-montecarlo``
    branch strings drawn from a seeded classical RNG;
``fully-quantum``
    the selector-ancilla circuit simulated gate by gate, with optional
    binomial shot noise on each measured population.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import circuit as qc
from . import qstate
from .channels import (
    BathParams,
    StepParams,
    apply_gadc,
    damping_kraus,
    free_evolution,
    make_step_params,
    pumping_kraus,
)

SPACINGS = ("geometric", "linear")
DEFAULT_SPACING = "geometric"
MAX_ENUMERATION_STEPS = 20
HYBRID_ENUMERATION_LIMIT = 12


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant excited-state energies ``omegas[0..N]``.

    Adiabatic strokes are instantaneous, so the total time is ``N * delta_tau``.
    """

    bath: BathParams
    omegas: tuple[float, ...]
    delta_tau: float
    tau_adi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        if len(self.omegas) < 2:
            raise ValueError("a schedule needs at least one step (two energies)")
        if any(not w > 0 for w in self.omegas):
            raise ValueError(f"energies must be positive, got {self.omegas}")
        if self.delta_tau < 0:
            raise ValueError("delta_tau must be non-negative")
        if self.tau_adi != 0:
            raise ValueError("only instantaneous quenches (tau_adi = 0) are supported")

    @property
    def num_steps(self) -> int:
        return len(self.omegas) - 1

    @property
    def omega_start(self) -> float:
        return self.omegas[0]

    @property
    def omega_end(self) -> float:
        return self.omegas[-1]

    @property
    def total_time(self) -> float:
        return self.num_steps * self.delta_tau

    def step_params(self) -> list[StepParams]:
        return [make_step_params(self.bath, w, self.delta_tau) for w in self.omegas[1:]]

    def initial_state(self) -> np.ndarray:
        return qstate.thermal_state(self.bath.beta, self.omega_start)


def _check_endpoints(omega_start, omega_end, num_steps):
    if not (omega_start > 0 and omega_end > 0):
        raise ValueError("energies must be positive")
    if num_steps < 1:
        raise ValueError("num_steps must be at least 1")


def linear_schedule(bath: BathParams, omega_start: float, omega_end: float, num_steps: int, delta_tau: float) -> Schedule:
    _check_endpoints(omega_start, omega_end, num_steps)
    j = np.arange(num_steps + 1)
    omegas = omega_start + j * (omega_end - omega_start) / num_steps
    omegas[-1] = omega_end
    return Schedule(bath, tuple(omegas), delta_tau)


def geometric_schedule(bath: BathParams, omega_start: float, omega_end: float, num_steps: int, delta_tau: float) -> Schedule:
    """Equal ratios ``omegas[j] / omegas[j-1]``. This spacing matches the reference exact-work values."""
    _check_endpoints(omega_start, omega_end, num_steps)
    j = np.arange(num_steps + 1)
    omegas = omega_start * (omega_end / omega_start) ** (j / num_steps)
    omegas[0], omegas[-1] = omega_start, omega_end
    return Schedule(bath, tuple(omegas), delta_tau)


def make_schedule(
    bath: BathParams,
    omega_start: float,
    omega_end: float,
    num_steps: int,
    delta_tau: float,
    spacing: str = DEFAULT_SPACING,
) -> Schedule:
    if spacing == "linear":
        return linear_schedule(bath, omega_start, omega_end, num_steps, delta_tau)
    if spacing == "geometric":
        return geometric_schedule(bath, omega_start, omega_end, num_steps, delta_tau)
    raise ValueError(f"unknown spacing {spacing!r}; choose from {SPACINGS}")


def quench_work(omega_prev: float, omega_next: float, p_e: float) -> float:
    if not 0.0 <= p_e <= 1.0:
        raise ValueError(f"p_e must be a probability, got {p_e}")
    return (omega_next - omega_prev) * p_e


def free_energy(beta: float, omega: float) -> float:
    """-k_B T ln Z for levels {0, omega}."""
    return -np.log1p(np.exp(-beta * omega)) / beta


def free_energy_difference(schedule: Schedule) -> float:
    beta = schedule.bath.beta
    return float(free_energy(beta, schedule.omega_end) - free_energy(beta, schedule.omega_start))


@dataclass(frozen=True)
class TrajectoryRecord:
    """One branch string; ``populations`` holds p_e at t_0, ..., t_N."""

    selections: str
    probability: float
    populations: tuple[float, ...]
    work: float


@dataclass
class WorkSummary:
    mode: str
    omegas: tuple[float, ...]
    delta_tau: float
    populations: list[float]
    step_works: list[float]
    mean_work: float
    delta_F: float
    extra_work: float
    shots: int | None = None
    seed: int | None = None
    trajectories: list[TrajectoryRecord] = field(default_factory=list)
    num_trajectories: int | None = None
    work_stderr: float | None = None
    final_population: float | None = None

    @property
    def num_steps(self) -> int:
        return len(self.omegas) - 1


def _summarize(schedule: Schedule, populations: Sequence[float], mode: str, **extra) -> WorkSummary:
    w = np.asarray(schedule.omegas)
    step_works = [quench_work(w[j - 1], w[j], populations[j - 1]) for j in range(1, len(w))]
    mean_work = float(np.sum(step_works))
    d_f = free_energy_difference(schedule)
    return WorkSummary(
        mode=mode,
        omegas=schedule.omegas,
        delta_tau=schedule.delta_tau,
        populations=[float(p) for p in populations[: schedule.num_steps]],
        step_works=[float(x) for x in step_works],
        mean_work=mean_work,
        delta_F=d_f,
        extra_work=mean_work - d_f,
        **extra,
    )


def run_exact(schedule: Schedule) -> WorkSummary:
    rho = schedule.initial_state()
    pops = []
    for step in schedule.step_params():
        pops.append(qstate.excited_population(rho))
        rho = apply_gadc(rho, step)
    return _summarize(schedule, pops, "exact", final_population=qstate.excited_population(rho))


def _branch_kraus(step: StepParams, branch: str):
    return damping_kraus(step.theta) if branch == qc.DOWN else pumping_kraus(step.theta)


def _isochoric_branch(rho: np.ndarray, step: StepParams, branch: str) -> np.ndarray:
    rho = qstate.apply_unitary(rho, free_evolution(step.omega, step.delta_tau), [0])
    return qstate.apply_kraus(rho, _branch_kraus(step, branch), [0])


def enumerate_trajectories(schedule: Schedule, max_steps: int = MAX_ENUMERATION_STEPS) -> list[TrajectoryRecord]:
    """All 2**N branch strings in lexicographic order (``d`` before ``u``)."""
    n = schedule.num_steps
    if n > max_steps:
        raise ValueError(f"2**{n} branch strings is too many to enumerate; use run_hybrid_montecarlo")
    steps = schedule.step_params()
    dw = np.diff(schedule.omegas)
    records = []

    def walk(rho, j, label, prob, pops):
        pops = pops + [qstate.excited_population(rho)]
        if j == n:
            work = float(np.dot(dw, pops[:n]))
            records.append(TrajectoryRecord(label, prob, tuple(pops), work))
            return
        step = steps[j]
        for branch, p in ((qc.DOWN, step.p_down), (qc.UP, step.p_up)):
            walk(_isochoric_branch(rho, step, branch), j + 1, label + branch, prob * p, pops)

    walk(schedule.initial_state(), 0, "", 1.0, [])
    return records


def run_hybrid_enumerate(schedule: Schedule, max_steps: int = MAX_ENUMERATION_STEPS) -> WorkSummary:
    records = enumerate_trajectories(schedule, max_steps)
    probs = np.array([r.probability for r in records])
    pops = probs @ np.array([r.populations for r in records])
    return _summarize(
        schedule,
        pops[:-1],
        "hybrid-enumerate",
        trajectories=records,
        num_trajectories=len(records),
        final_population=float(pops[-1]),
    )


def run_hybrid_montecarlo(schedule: Schedule, num_trajectories: int, seed: int | None = 0) -> WorkSummary:
    """Branch ``j`` is damping when a uniform draw r satisfies r <= p_down, pumping otherwise."""
    if num_trajectories < 1:
        raise ValueError("num_trajectories must be at least 1")
    steps = schedule.step_params()
    n = schedule.num_steps
    draws = np.random.default_rng(seed).random((num_trajectories, n))
    rho = np.broadcast_to(schedule.initial_state(), (num_trajectories, 2, 2)).copy()
    pops = np.empty((num_trajectories, n))
    for j, step in enumerate(steps):
        pops[:, j] = np.clip(rho[:, 1, 1].real, 0.0, 1.0)
        u = free_evolution(step.omega, step.delta_tau)
        rho = u @ rho @ u.conj().T
        down = draws[:, j] <= step.p_down
        out = np.empty_like(rho)
        for mask, ops in ((down, damping_kraus(step.theta)), (~down, pumping_kraus(step.theta))):
            sub = rho[mask]
            out[mask] = sum(k @ sub @ k.conj().T for k in ops)
        rho = out
    final = float(np.clip(rho[:, 1, 1].real, 0.0, 1.0).mean())
    works = pops @ np.diff(schedule.omegas)
    stderr = float(works.std(ddof=1) / np.sqrt(num_trajectories)) if num_trajectories > 1 else None
    return _summarize(
        schedule,
        pops.mean(axis=0),
        "hybrid-montecarlo",
        seed=seed,
        num_trajectories=num_trajectories,
        work_stderr=stderr,
        final_population=final,
    )


def run_hybrid(schedule: Schedule, num_trajectories: int = 100_000, seed: int | None = 0) -> WorkSummary:
    """Enumerate when N <= 12, otherwise sample trajectories."""
    if schedule.num_steps <= HYBRID_ENUMERATION_LIMIT:
        return run_hybrid_enumerate(schedule)
    return run_hybrid_montecarlo(schedule, num_trajectories, seed)


def child_seeds(seed: int | None, count: int) -> list[int | None]:
    """Independent per-circuit seeds derived from one user seed."""
    if seed is None:
        return [None] * count
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def process_circuit(
    schedule: Schedule,
    ancilla_mode: str = "reset",
    preparation: str = "mixed",
    selections: str | None = None,
) -> qc.Circuit:
    """Fully quantum circuit, or with ``selections`` the hybrid circuit of one branch string."""
    p_e0 = qstate.thermal_populations(schedule.bath.beta, schedule.omega_start)[1]
    steps = schedule.step_params()
    if selections is None:
        return qc.fully_quantum_circuit(steps, p_e0, ancilla_mode, preparation)
    return qc.hybrid_circuit(steps, selections, p_e0, ancilla_mode, preparation)


def run_fully_quantum(
    schedule: Schedule,
    shots: int | None = None,
    seed: int | None = 0,
    ancilla_mode: str = "reset",
    preparation: str = "mixed",
) -> WorkSummary:
    """Measure the system qubit after the first j stages, j = 0..N.

    Without ``shots`` the populations are exact reduced-state values. With
    ``shots``, each of the N + 1 measurement circuits gets its own binomial
    record and its own child seed.
    """
    circ = process_circuit(schedule, ancilla_mode, preparation)
    exact = qc.step_populations(circ)
    n = schedule.num_steps
    if shots is None:
        return _summarize(schedule, exact[:n], "fully-quantum", final_population=exact[n])
    results = [qc.sample_population(p, shots, s) for p, s in zip(exact, child_seeds(seed, n + 1))]
    pops = [r.p_e_estimate for r in results]
    summary = _summarize(schedule, pops[:n], "fully-quantum", shots=shots, seed=seed, final_population=pops[n])
    dw = np.diff(schedule.omegas)
    var = sum(d * d * p * (1 - p) / shots for d, p in zip(dw, exact[:n]))
    summary.work_stderr = float(np.sqrt(var))
    return summary


@dataclass(frozen=True)
class ScalingFit:
    points: tuple[tuple[int, float], ...]
    slope: float
    coefficient: float
    residual: float
    fit_points: tuple[tuple[int, float], ...]


def scaling_sweep(
    bath: BathParams,
    omega_start: float,
    omega_end: float,
    delta_tau: float,
    n_values: Sequence[int],
    spacing: str = DEFAULT_SPACING,
) -> list[tuple[int, WorkSummary]]:
    n_values = list(n_values)
    if not n_values:
        raise ValueError("n_values is empty")
    if n_values != sorted(n_values):
        raise ValueError("n_values must be ascending")
    return [(n, run_exact(make_schedule(bath, omega_start, omega_end, n, delta_tau, spacing))) for n in n_values]


def fit_power_law(points: Sequence[tuple[int, float]]) -> ScalingFit:
    """Least-squares line through (log N, log extra_work) over the upper half of the N range."""
    points = sorted((int(n), float(e)) for n, e in points)
    if len(points) < 4:
        raise ValueError("need at least 4 points to fit")
    if any(e <= 0 for _, e in points):
        raise ValueError("extra work must be positive to take logarithms")
    upper = points[len(points) // 2 :]
    x = np.log([n for n, _ in upper])
    y = np.log([e for _, e in upper])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return ScalingFit(tuple(points), float(slope), float(np.exp(intercept)), residual, tuple(upper))
