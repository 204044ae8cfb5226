"""Gate-level dilation of the bath channels and exact register simulation.

Amplitude damping uses one ancilla in ``|0>``: a controlled ``RY(2 theta)``
from the system onto the ancilla, then a CNOT back. Pumping is the same stage
conjugated by ``X`` on the system. The fully quantum stage adds a selector
qubit rotated by ``RX(alpha)`` with ``cos(alpha/2) = sqrt(p_down)``. Every
damping gate is controlled on selector 0 and every pumping gate on selector 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qstate
from .channels import StepParams, free_evolution, superoperator_of

NOT = "NOT"
ROT_X = "ROT_X"
ROT_Y = "ROT_Y"
FREE_EVOLUTION = "FREE_EVOLUTION"
RESET = "RESET"

KINDS = (NOT, ROT_X, ROT_Y, FREE_EVOLUTION, RESET)

DOWN = "d"
UP = "u"

_RESET_KRAUS = (
    np.array([[1, 0], [0, 0]], dtype=complex),
    np.array([[0, 1], [0, 0]], dtype=complex),
)


class RegisterSizeError(qstate.QStateError):
    pass


def rx_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


@dataclass(frozen=True)
class Gate:
    """A single-target gate, optionally controlled on other wires.

    ``controls`` holds ``(wire, state)`` pairs; the gate fires only when every
    control wire is in the given basis state. ``RESET`` is the one
    non-unitary instruction: it returns ``target`` to ``|0>``.
    """

    kind: str
    target: int
    params: tuple[float, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        wires = [self.target] + [w for w, _ in self.controls]
        if len(set(wires)) != len(wires):
            raise qstate.WireError(f"control and target overlap in {wires}")
        if any(s not in (0, 1) for _, s in self.controls):
            raise ValueError("control states must be 0 or 1")
        if not all(np.isfinite(self.params)):
            raise ValueError("gate parameters must be finite")
        if self.kind == RESET and self.controls:
            raise ValueError("RESET cannot be controlled")

    @property
    def wires(self) -> list[int]:
        return [w for w, _ in self.controls] + [self.target]

    def base_matrix(self) -> np.ndarray:
        if self.kind == NOT:
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind == ROT_X:
            return rx_matrix(self.params[0])
        if self.kind == ROT_Y:
            return ry_matrix(self.params[0])
        if self.kind == FREE_EVOLUTION:
            return free_evolution(*self.params)
        raise ValueError(f"{self.kind} has no unitary matrix")

    def matrix(self) -> np.ndarray:
        """Unitary on ``self.wires`` (controls first, target last)."""
        base = self.base_matrix()
        k = len(self.controls)
        u = np.eye(2 ** (k + 1), dtype=complex)
        active = sum(s << (k - 1 - i) for i, (_, s) in enumerate(self.controls))
        u[2 * active : 2 * active + 2, 2 * active : 2 * active + 2] = base
        return u

    def controlled(self, wire: int, state: int = 1) -> "Gate":
        return Gate(self.kind, self.target, self.params, self.controls + ((wire, state),))


def x(target: int) -> Gate:
    return Gate(NOT, target)


def rx(angle: float, target: int) -> Gate:
    return Gate(ROT_X, target, (float(angle),))


def ry(angle: float, target: int) -> Gate:
    return Gate(ROT_Y, target, (float(angle),))


def cnot(control: int, target: int, state: int = 1) -> Gate:
    return Gate(NOT, target, (), ((control, state),))


def cry(angle: float, control: int, target: int, state: int = 1) -> Gate:
    return Gate(ROT_Y, target, (float(angle),), ((control, state),))


def free_evolution_gate(omega: float, delta_tau: float, target: int) -> Gate:
    return Gate(FREE_EVOLUTION, target, (float(omega), float(delta_tau)))


def reset(target: int) -> Gate:
    return Gate(RESET, target)


@dataclass(frozen=True)
class Circuit:
    num_wires: int
    gates: tuple[Gate, ...] = ()
    initial_states: tuple[np.ndarray, ...] | None = None
    measure_wire: int = 0
    # gate index where each elementary step of a process circuit begins
    step_starts: tuple[int, ...] = ()

    def __post_init__(self):
        if self.num_wires < 1:
            raise ValueError("a circuit needs at least one wire")
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.initial_states is None:
            object.__setattr__(self, "initial_states", tuple(qstate.GROUND for _ in range(self.num_wires)))
        else:
            object.__setattr__(self, "initial_states", tuple(np.asarray(s, dtype=complex) for s in self.initial_states))
        if len(self.initial_states) != self.num_wires:
            raise ValueError("need one initial state per wire")
        for g in self.gates:
            for w in g.wires:
                if not 0 <= w < self.num_wires:
                    raise qstate.WireError(f"gate {g.kind} uses wire {w} outside 0..{self.num_wires - 1}")
        if not 0 <= self.measure_wire < self.num_wires:
            raise qstate.WireError(f"measured wire {self.measure_wire} out of range")
        object.__setattr__(self, "step_starts", tuple(int(i) for i in self.step_starts))
        if list(self.step_starts) != sorted(self.step_starts) or any(
            not 0 <= i <= len(self.gates) for i in self.step_starts
        ):
            raise ValueError("step_starts must be ascending gate indices")

    def initial_register(self) -> np.ndarray:
        rho = self.initial_states[0]
        for s in self.initial_states[1:]:
            rho = qstate.tensor_product(rho, s)
        return rho

    def has_ground_initial_states(self) -> bool:
        return all(np.max(np.abs(s - qstate.GROUND)) <= 1e-15 for s in self.initial_states)


@dataclass(frozen=True)
class ShotResult:
    shots: int
    excited_count: int
    seed: int | None

    @property
    def p_e_estimate(self) -> float:
        return self.excited_count / self.shots


def apply_gate(rho: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind == RESET:
        return qstate.apply_kraus(rho, _RESET_KRAUS, [gate.target])
    return qstate.apply_unitary(rho, gate.matrix(), gate.wires)


def run_gates(rho: np.ndarray, gates: Iterable[Gate]) -> np.ndarray:
    for g in gates:
        rho = apply_gate(rho, g)
    return rho


def simulate(circuit: Circuit, validate: bool = True) -> np.ndarray:
    """Final full-register density matrix of ``circuit``."""
    if circuit.num_wires > qstate.MAX_WIRES:
        raise RegisterSizeError(f"{circuit.num_wires} wires exceeds the {qstate.MAX_WIRES}-wire limit")
    rho = run_gates(circuit.initial_register(), circuit.gates)
    if validate:
        qstate.check_density_matrix(rho)
    return rho


def sample_population(p_e: float, shots: int, seed: int | None) -> ShotResult:
    if shots < 1:
        raise ValueError("shots must be at least 1")
    count = int(np.random.default_rng(seed).binomial(shots, p_e))
    return ShotResult(shots=int(shots), excited_count=count, seed=seed)


def sample_counts(circuit: Circuit, shots: int, seed: int | None) -> ShotResult:
    """Binomial shot record for measuring ``circuit.measure_wire``; no collapse is simulated."""
    p_e = qstate.excited_population(simulate(circuit), circuit.measure_wire)
    return sample_population(p_e, shots, seed)


# --- dilation stages -------------------------------------------------------


def build_damping_stage(theta: float, system: int, ancilla: int) -> list[Gate]:
    if system == ancilla:
        raise qstate.WireError("system and ancilla must differ")
    return [cry(2 * theta, system, ancilla), cnot(ancilla, system)]


def build_pumping_stage(theta: float, system: int, ancilla: int) -> list[Gate]:
    return [x(system), *build_damping_stage(theta, system, ancilla), x(system)]


def selector_angle(p_down: float) -> float:
    """``alpha`` with cos(alpha/2) = sqrt(p_down)."""
    return 2.0 * float(np.arccos(np.sqrt(np.clip(p_down, 0.0, 1.0))))


def build_fully_quantum_stage(step: StepParams, system: int, damp_ancilla: int, selector: int) -> list[Gate]:
    if len({system, damp_ancilla, selector}) != 3:
        raise qstate.WireError("fully quantum stage needs three distinct wires")
    gates = [rx(selector_angle(step.p_down), selector)]
    gates += [g.controlled(selector, 0) for g in build_damping_stage(step.theta, system, damp_ancilla)]
    gates += [g.controlled(selector, 1) for g in build_pumping_stage(step.theta, system, damp_ancilla)]
    return gates


def induced_superoperator(gates: Sequence[Gate], num_wires: int, system: int = 0) -> np.ndarray:
    """Transfer matrix on ``system`` of ``gates`` with every other wire starting in ``|0>``."""
    others = [w for w in range(num_wires) if w != system]

    def channel(mat):
        full = np.ones((1, 1), dtype=complex)
        for w in range(num_wires):
            full = np.kron(full, mat if w == system else qstate.GROUND)
        full = run_gates(full, gates)
        return qstate.partial_trace(full, others)

    return superoperator_of(channel)


# --- whole-process circuits ------------------------------------------------


def parse_selections(selections: str | Sequence[str]) -> list[str]:
    """Normalize a branch string such as ``"du"``, ``"01"`` or ``"↓↑"``."""
    table = {"d": DOWN, "↓": DOWN, "0": DOWN, "D": DOWN, "u": UP, "↑": UP, "1": UP, "U": UP}
    out = []
    for ch in selections:
        if ch not in table:
            raise ValueError(f"unknown branch label {ch!r}; use d/u, 0/1 or arrows")
        out.append(table[ch])
    return out


def _preparation(num_wires: int, p_e0: float, preparation: str):
    if preparation == "mixed":
        first = np.diag([1.0 - p_e0, p_e0]).astype(complex)
        return (first,) + tuple(qstate.GROUND for _ in range(num_wires - 1)), []
    if preparation == "coherent":
        angle = 2.0 * float(np.arccos(np.sqrt(1.0 - p_e0)))
        return None, [ry(angle, 0)]
    raise ValueError(f"unknown preparation {preparation!r}; use 'mixed' or 'coherent'")


def fully_quantum_circuit(
    steps: Sequence[StepParams],
    p_e0: float,
    ancilla_mode: str = "accumulate",
    preparation: str = "mixed",
    free_evolve: bool = True,
) -> Circuit:
    """System on wire 0; step j uses wires (2j-1, 2j) or, in reset mode, (1, 2) reset after use."""
    if ancilla_mode == "accumulate":
        n = 2 * len(steps) + 1
    elif ancilla_mode == "reset":
        n = 3
    else:
        raise ValueError(f"unknown ancilla mode {ancilla_mode!r}")
    if n > qstate.MAX_WIRES:
        raise RegisterSizeError(f"accumulate mode needs {n} wires, limit is {qstate.MAX_WIRES}; use reset mode")
    init, gates = _preparation(n, p_e0, preparation)
    starts = []
    for j, step in enumerate(steps, start=1):
        starts.append(len(gates))
        a, s = (2 * j - 1, 2 * j) if ancilla_mode == "accumulate" else (1, 2)
        if free_evolve:
            gates.append(free_evolution_gate(step.omega, step.delta_tau, 0))
        gates += build_fully_quantum_stage(step, 0, a, s)
        if ancilla_mode == "reset" and j < len(steps):
            gates += [reset(a), reset(s)]
    return Circuit(n, tuple(gates), init, 0, tuple(starts))


def hybrid_circuit(
    steps: Sequence[StepParams],
    selections: str | Sequence[str],
    p_e0: float,
    ancilla_mode: str = "accumulate",
    preparation: str = "mixed",
    free_evolve: bool = True,
) -> Circuit:
    """One branch string of the hybrid scheme: N+1 wires, or 2 in reset mode."""
    branch = parse_selections(selections)
    if len(branch) != len(steps):
        raise ValueError(f"{len(branch)} branch labels for {len(steps)} steps")
    if ancilla_mode == "accumulate":
        n = len(steps) + 1
    elif ancilla_mode == "reset":
        n = 2
    else:
        raise ValueError(f"unknown ancilla mode {ancilla_mode!r}")
    if n > qstate.MAX_WIRES:
        raise RegisterSizeError(f"accumulate mode needs {n} wires, limit is {qstate.MAX_WIRES}; use reset mode")
    init, gates = _preparation(n, p_e0, preparation)
    starts = []
    for j, (step, b) in enumerate(zip(steps, branch), start=1):
        starts.append(len(gates))
        a = j if ancilla_mode == "accumulate" else 1
        if free_evolve:
            gates.append(free_evolution_gate(step.omega, step.delta_tau, 0))
        build = build_damping_stage if b == DOWN else build_pumping_stage
        gates += build(step.theta, 0, a)
        if ancilla_mode == "reset" and j < len(steps):
            gates.append(reset(a))
    return Circuit(n, tuple(gates), init, 0, tuple(starts))


def prefix(circuit: Circuit, num_steps: int) -> Circuit:
    """The first ``num_steps`` elementary steps; measuring it gives p_e(t_j) for j = num_steps."""
    bounds = list(circuit.step_starts) + [len(circuit.gates)]
    if not 0 <= num_steps < len(bounds):
        raise ValueError(f"circuit has {len(bounds) - 1} steps, asked for {num_steps}")
    cut = bounds[num_steps]
    return Circuit(circuit.num_wires, circuit.gates[:cut], circuit.initial_states, circuit.measure_wire, circuit.step_starts[:num_steps])


def step_populations(circuit: Circuit) -> list[float]:
    """Exact p_e on the measured wire at t_0, ..., t_N, from a single pass over the gates."""
    if circuit.num_wires > qstate.MAX_WIRES:
        raise RegisterSizeError(f"{circuit.num_wires} wires exceeds the {qstate.MAX_WIRES}-wire limit")
    rho = circuit.initial_register()
    pops = []
    done = 0
    for cut in list(circuit.step_starts) + [len(circuit.gates)]:
        rho = run_gates(rho, circuit.gates[done:cut])
        done = cut
        pops.append(qstate.excited_population(rho, circuit.measure_wire))
    return pops
