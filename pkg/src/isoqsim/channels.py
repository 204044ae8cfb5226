"""Thermal bath physics for one two-level system.

Includes the generalized amplitude damping (GAD) step map built from its
damping and pumping sub-channels, and a Runge-Kutta integrator of the
Lindblad master equation. The integrator is an independent reference for the
closed-form channel.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import qstate

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g|
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)

SELF_CONSISTENCY_TOL = 1e-10
TRACE_DRIFT_TOL = 1e-8
SUBSTEPS_PER_UNIT_TIME = 1000


class StepSizeError(RuntimeError):
    """RK4 integration did not reach the requested accuracy."""


@dataclass(frozen=True)
class BathParams:
    beta: float = 1.0
    gamma0: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.gamma0 > 0:
            raise ValueError(f"gamma0 must be positive, got {self.gamma0}")

    def photon_number(self, omega: float) -> float:
        return 1.0 / np.expm1(self.beta * omega)

    def relaxation_rate(self, omega: float) -> float:
        """Population relaxation rate gamma0 (2N + 1)."""
        return self.gamma0 / np.tanh(0.5 * self.beta * omega)


@dataclass(frozen=True)
class StepParams:
    """Channel parameters of one isochoric contact at fixed ``omega``.

    ``theta`` is kept next to the values that define it so the relation
    cos(theta) = exp(-gamma0 dtau (2N+1) / 2) can be checked directly.
    """

    omega: float
    delta_tau: float
    theta: float
    p_up: float
    p_down: float
    n_photon: float
    bath: BathParams


def make_step_params(bath: BathParams, omega: float, delta_tau: float) -> StepParams:
    if not omega > 0:
        raise ValueError(f"omega must be positive (photon number diverges), got {omega}")
    if delta_tau < 0:
        raise ValueError(f"delta_tau must be non-negative, got {delta_tau}")
    cos_theta = np.exp(-0.5 * delta_tau * bath.relaxation_rate(omega))
    p_up = 1.0 / (np.exp(bath.beta * omega) + 1.0)
    return StepParams(
        omega=float(omega),
        delta_tau=float(delta_tau),
        theta=float(np.arccos(np.clip(cos_theta, 0.0, 1.0))),
        p_up=float(p_up),
        p_down=float(1.0 - p_up),
        n_photon=float(bath.photon_number(omega)),
        bath=bath,
    )


def damping_kraus(theta: float) -> tuple[np.ndarray, np.ndarray]:
    m0 = np.array([[1, 0], [0, np.cos(theta)]], dtype=complex)
    m1 = np.sin(theta) * SIGMA_MINUS
    return m0, m1


def pumping_kraus(theta: float) -> tuple[np.ndarray, np.ndarray]:
    m2 = np.array([[np.cos(theta), 0], [0, 1]], dtype=complex)
    m3 = np.sin(theta) * SIGMA_PLUS
    return m2, m3


def free_evolution(omega: float, delta_tau: float) -> np.ndarray:
    """exp(-i H dtau) for H = omega |e><e|."""
    return np.diag([1.0, np.exp(-1j * omega * delta_tau)])


def gadc_kraus(step: StepParams) -> tuple[np.ndarray, ...]:
    """Four Kraus operators of the weighted mixture, without the free evolution."""
    down = [np.sqrt(step.p_down) * m for m in damping_kraus(step.theta)]
    up = [np.sqrt(step.p_up) * m for m in pumping_kraus(step.theta)]
    return tuple(down + up)


def apply_damping(rho: np.ndarray, theta: float, wire: int = 0) -> np.ndarray:
    return qstate.apply_kraus(rho, damping_kraus(theta), [wire])


def apply_pumping(rho: np.ndarray, theta: float, wire: int = 0) -> np.ndarray:
    return qstate.apply_kraus(rho, pumping_kraus(theta), [wire])


def apply_gadc(rho: np.ndarray, step: StepParams, wire: int = 0, validate: bool = False) -> np.ndarray:
    """One isochoric step: free evolution under H, then the GAD mixture."""
    rho = qstate.apply_unitary(rho, free_evolution(step.omega, step.delta_tau), [wire])
    out = step.p_down * apply_damping(rho, step.theta, wire) + step.p_up * apply_pumping(rho, step.theta, wire)
    if validate or qstate.is_strict():
        qstate.check_density_matrix(out)
    return out


def _dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    op_dag = op.conj().T
    nop = op_dag @ op
    return op @ rho @ op_dag - 0.5 * (nop @ rho + rho @ nop)


def lindblad_rhs(rho: np.ndarray, omega: float, bath: BathParams) -> np.ndarray:
    """Time derivative of ``rho``; also accepts a stack of shape ``(..., 2, 2)``."""
    n = bath.photon_number(omega)
    h = np.diag([0.0, omega]).astype(complex)
    return (
        -1j * (h @ rho - rho @ h)
        + bath.gamma0 * n * _dissipator(SIGMA_PLUS, rho)
        + bath.gamma0 * (n + 1) * _dissipator(SIGMA_MINUS, rho)
    )


def liouvillian(omega: float, bath: BathParams) -> np.ndarray:
    """Matrix of ``lindblad_rhs`` acting on column-stacked density matrices."""
    return superoperator_of(lambda x: lindblad_rhs(x, omega, bath))


def rk4_step_matrix(generator: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for dy/dt = L y.

    For a constant linear generator the four stages collapse to the
    degree-4 Taylor polynomial in hL, so n steps are ``P**n``.
    """
    a = h * generator
    eye = np.eye(a.shape[0], dtype=complex)
    return eye + a @ (eye + a @ (eye / 2 + a @ (eye / 6 + a / 24)))


def _rk4(vecs: np.ndarray, generator: np.ndarray, duration: float, steps: int) -> np.ndarray:
    step = rk4_step_matrix(generator, duration / steps)
    return np.linalg.matrix_power(step, steps) @ vecs


def _integrate(vecs, generator, duration, num_substeps, max_doublings=12):
    if duration < 0:
        raise ValueError(f"duration must be non-negative, got {duration}")
    if duration == 0:
        return np.array(vecs, dtype=complex)
    if num_substeps is not None:
        return _rk4(vecs, generator, duration, int(num_substeps))
    steps = max(1, int(np.ceil(SUBSTEPS_PER_UNIT_TIME * duration)))
    coarse = _rk4(vecs, generator, duration, steps)
    for _ in range(max_doublings):
        steps *= 2
        fine = _rk4(vecs, generator, duration, steps)
        if np.max(np.abs(fine - coarse)) < SELF_CONSISTENCY_TOL:
            return fine
        coarse = fine
    raise StepSizeError(f"RK4 not self-consistent to {SELF_CONSISTENCY_TOL} with {steps} substeps")


def evolve_master_equation(
    rho: np.ndarray,
    omega: float,
    bath: BathParams,
    duration: float,
    num_substeps: int | None = None,
) -> np.ndarray:
    """Integrate the master equation with classical RK4.

    With ``num_substeps=None`` the substep count starts at 1000 per unit time
    and doubles until halving the step moves the result by less than 1e-10.
    """
    rho = np.asarray(rho, dtype=complex)
    vec = _integrate(rho.reshape(-1, order="F"), liouvillian(omega, bath), duration, num_substeps)
    out = vec.reshape(rho.shape, order="F")
    out = 0.5 * (out + out.conj().T)
    drift = abs(np.trace(out) - 1.0)
    if drift > TRACE_DRIFT_TOL:
        raise StepSizeError(f"trace drifted by {drift:.3e}; use more substeps")
    return out / np.trace(out).real


def superoperator_of(channel: Callable[[np.ndarray], np.ndarray], dim: int = 2) -> np.ndarray:
    """Transfer matrix S with vec(channel(X)) = S vec(X), column stacking."""
    cols = []
    for j in range(dim):
        for i in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            cols.append(np.asarray(channel(unit)).reshape(-1, order="F"))
    return np.stack(cols, axis=1)


def kraus_superoperator(ops) -> np.ndarray:
    return sum(np.kron(k.conj(), k) for k in ops)


def apply_superoperator(s: np.ndarray, rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    return (s @ rho.reshape(-1, order="F")).reshape((d, d), order="F")


def lindblad_superoperator(omega: float, bath: BathParams, duration: float, num_substeps: int | None = None) -> np.ndarray:
    """RK4-propagated transfer matrix of the master equation over ``duration``."""
    return _integrate(np.eye(4, dtype=complex), liouvillian(omega, bath), duration, num_substeps)


def gadc_superoperator(step: StepParams) -> np.ndarray:
    return superoperator_of(lambda x: apply_gadc(x, step))
