"""Dense density-matrix algebra on small qubit registers.

States are plain complex ``numpy`` arrays of shape ``(2**n, 2**n)``. Wire 0
is the most significant tensor factor, so ``tensor_product(a, b)`` places the
wires of ``a`` on the lower indices. Within every qubit ``|g>`` is index 0 and
``|e>`` is index 1.
"""
from __future__ import annotations

import contextlib
from typing import Iterable, Sequence

import numpy as np

MAX_WIRES = 13

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-12
KRAUS_TOL = 1e-12

GROUND = np.array([[1, 0], [0, 0]], dtype=complex)
EXCITED = np.array([[0, 0], [0, 1]], dtype=complex)

_strict = False


class QStateError(ValueError):
    """Base class for invalid register operations."""


class InvalidStateError(QStateError):
    pass


class UnitarityError(QStateError):
    pass


class WireError(QStateError):
    pass


class IncompleteKrausError(QStateError):
    pass


def set_strict(flag: bool) -> None:
    """Validate every returned state, not only the ones asked for."""
    global _strict
    _strict = bool(flag)


def is_strict() -> bool:
    return _strict


@contextlib.contextmanager
def strict_mode(flag: bool = True):
    previous = _strict
    set_strict(flag)
    try:
        yield
    finally:
        set_strict(previous)


def num_wires(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.ndim != 2 or rho.shape[1] != dim or 1 << n != dim:
        raise InvalidStateError(f"not a square 2^n register matrix: shape {rho.shape}")
    return n


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Raise :class:`InvalidStateError` unless ``rho`` is Hermitian, unit trace and PSD."""
    rho = np.asarray(rho)
    num_wires(rho)
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITIAN_TOL:
        raise InvalidStateError(f"not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise InvalidStateError(f"trace {tr.real:.15g} differs from 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lo < -PSD_TOL:
        raise InvalidStateError(f"negative eigenvalue {lo:.3e}")
    return rho


def _finish(rho: np.ndarray, validate: bool) -> np.ndarray:
    if validate or _strict:
        check_density_matrix(rho)
    return rho


def basis_state(bits: Sequence[int]) -> np.ndarray:
    """Projector onto the computational basis state ``|bits>``."""
    rho = np.ones((1, 1), dtype=complex)
    for b in bits:
        rho = np.kron(rho, EXCITED if b else GROUND)
    return rho


def thermal_populations(beta: float, omega: float) -> tuple[float, float]:
    """``(p_g, p_e)`` of a two-level Gibbs state with ground energy 0."""
    p_e = 1.0 / (np.exp(beta * omega) + 1.0)
    return 1.0 - p_e, p_e


def thermal_state(beta: float, omega: float) -> np.ndarray:
    p_g, p_e = thermal_populations(beta, omega)
    return np.diag([p_g, p_e]).astype(complex)


def tensor_product(a: np.ndarray, b: np.ndarray, validate: bool = False) -> np.ndarray:
    num_wires(a)
    num_wires(b)
    return _finish(np.kron(a, b), validate)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def _check_wires(wires: Iterable[int], n: int) -> list[int]:
    wires = [int(w) for w in wires]
    if len(set(wires)) != len(wires):
        raise WireError(f"wire collision in {wires}")
    for w in wires:
        if not 0 <= w < n:
            raise WireError(f"wire {w} out of range for a {n}-wire register")
    return wires


def _act(tensor: np.ndarray, op: np.ndarray, axes: list[int]) -> np.ndarray:
    # contract op's input legs with the given tensor axes, put its output legs back in place
    k = len(axes)
    op_t = op.reshape((2,) * (2 * k))
    out = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _sandwich(rho: np.ndarray, op: np.ndarray, wires: list[int], n: int) -> np.ndarray:
    """``op rho op^dagger`` with ``op`` embedded on ``wires``."""
    if len(wires) == n and wires == list(range(n)):
        return op @ rho @ op.conj().T
    t = rho.reshape((2,) * (2 * n))
    t = _act(t, op, wires)
    t = _act(t, op.conj(), [w + n for w in wires])
    return t.reshape(rho.shape)


def apply_unitary(rho: np.ndarray, u: np.ndarray, wires: Sequence[int], validate: bool = False) -> np.ndarray:
    n = num_wires(rho)
    wires = _check_wires(wires, n)
    u = np.asarray(u, dtype=complex)
    if u.shape != (1 << len(wires), 1 << len(wires)):
        raise WireError(f"operator of shape {u.shape} does not fit {len(wires)} wires")
    if not is_unitary(u):
        raise UnitarityError("operator is not unitary within 1e-12")
    return _finish(_sandwich(rho, u, wires, n), validate)


def check_kraus_completeness(ops: Sequence[np.ndarray], tol: float = KRAUS_TOL) -> None:
    ops = [np.asarray(k) for k in ops]
    if not ops:
        raise IncompleteKrausError("empty Kraus set")
    dim = ops[0].shape[0]
    total = sum(k.conj().T @ k for k in ops)
    dev = np.max(np.abs(total - np.eye(dim)))
    if dev > tol:
        raise IncompleteKrausError(f"sum of K^dagger K deviates from identity by {dev:.3e}")


def apply_kraus(rho: np.ndarray, ops: Sequence[np.ndarray], wires: Sequence[int], validate: bool = False) -> np.ndarray:
    n = num_wires(rho)
    wires = _check_wires(wires, n)
    ops = [np.asarray(k, dtype=complex) for k in ops]
    for k in ops:
        if k.shape != (1 << len(wires), 1 << len(wires)):
            raise WireError(f"Kraus operator of shape {k.shape} does not fit {len(wires)} wires")
    check_kraus_completeness(ops)
    out = np.zeros_like(rho, dtype=complex)
    for k in ops:
        out += _sandwich(rho, k, wires, n)
    return _finish(out, validate)


def partial_trace(rho: np.ndarray, discard: Sequence[int], validate: bool = False) -> np.ndarray:
    """Trace out ``discard``; surviving wires keep their relative order."""
    n = num_wires(rho)
    discard = _check_wires(discard, n)
    if len(discard) == n:
        raise WireError("cannot trace out every wire")
    if not discard:
        return _finish(rho.copy(), validate)
    keep = [w for w in range(n) if w not in discard]
    rows = list(range(n))
    cols = [w if w in discard else w + n for w in range(n)]
    out_idx = keep + [w + n for w in keep]
    out = np.einsum(rho.reshape((2,) * (2 * n)), rows + cols, out_idx)
    dim = 1 << len(keep)
    return _finish(out.reshape(dim, dim), validate)


def excited_population(rho: np.ndarray, wire: int = 0) -> float:
    """Probability of finding ``wire`` in ``|e>``, clamped to [0, 1]."""
    n = num_wires(rho)
    (wire,) = _check_wires([wire], n)
    diag = np.real(np.diagonal(rho)).reshape((2,) * n)
    p = float(np.take(diag, 1, axis=wire).sum())
    if not -PSD_TOL <= p <= 1 + PSD_TOL:
        raise InvalidStateError(f"excited population {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise QStateError(f"dimension mismatch {a.shape} vs {b.shape}")
    d = a - b
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T)))))


def random_density_matrix(n_wires: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed mixed state, handy for randomized checks."""
    dim = 1 << n_wires
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)
