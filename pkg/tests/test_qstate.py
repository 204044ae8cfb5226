import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoqsim import qstate
from isoqsim.channels import damping_kraus, free_evolution

from conftest import max_abs

G, E = qstate.GROUND, qstate.EXCITED
X = np.array([[0, 1], [1, 0]], dtype=complex)


def haar_unitary(dim, rng):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_tensor_product_pure_ground():
    out = qstate.tensor_product(G, G)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    assert max_abs(out, expected) == 0


def test_tensor_product_diagonal_arithmetic():
    out = qstate.tensor_product(np.diag([0.7, 0.3]), np.diag([0.9, 0.1]))
    assert max_abs(np.diag(out), [0.63, 0.07, 0.27, 0.03]) < 1e-15


def test_first_factor_takes_low_wire_index():
    rho = qstate.tensor_product(E, G)
    assert qstate.excited_population(rho, 0) == 1
    assert qstate.excited_population(rho, 1) == 0


def test_trace_out_maximally_mixed_factor(rng):
    rho = qstate.random_density_matrix(1, rng)
    assert max_abs(qstate.partial_trace(qstate.tensor_product(rho, np.eye(2) / 2), [1]), rho) < 1e-15


def test_bell_state_marginals():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = np.outer(psi, psi.conj())
    for w in (0, 1):
        assert max_abs(qstate.partial_trace(bell, [w]), np.eye(2) / 2) < 1e-15


def test_partial_trace_keeps_wire_order(rng):
    a, b, c = (qstate.random_density_matrix(1, rng) for _ in range(3))
    abc = qstate.tensor_product(qstate.tensor_product(a, b), c)
    assert max_abs(qstate.partial_trace(abc, [1]), np.kron(a, c)) < 1e-14
    assert max_abs(qstate.partial_trace(abc, [0, 2]), b) < 1e-14


def test_partial_trace_matches_brute_force(rng):
    rho = qstate.random_density_matrix(3, rng)
    # explicit sum over the discarded middle wire
    brute = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        proj = np.kron(np.kron(np.eye(2), np.eye(2)[k][None, :]), np.eye(2))
        brute += proj @ rho @ proj.conj().T
    assert max_abs(qstate.partial_trace(rho, [1]), brute) < 1e-15


def test_partial_trace_rejects_all_wires():
    with pytest.raises(qstate.WireError):
        qstate.partial_trace(np.kron(G, G), [0, 1])


def test_apply_unitary_identity_and_flip(rng):
    rho = qstate.random_density_matrix(1, rng)
    assert max_abs(qstate.apply_unitary(rho, np.eye(2), [0]), rho) < 1e-15
    assert max_abs(qstate.apply_unitary(G, X, [0]), E) == 0


def test_free_evolution_rotates_coherence_phase():
    rho = np.array([[0.5, 0.1], [0.1, 0.5]], dtype=complex)  # rho[1, 0] is rho_eg
    out = qstate.apply_unitary(rho, free_evolution(1.0, 0.5), [0])
    assert abs(abs(out[1, 0]) - 0.1) < 1e-15
    assert abs(np.angle(out[1, 0]) - (-0.5)) < 1e-14
    assert max_abs(np.diag(out), np.diag(rho)) < 1e-15


def test_apply_unitary_on_embedded_wire_matches_kron(rng):
    rho = qstate.random_density_matrix(3, rng)
    u = haar_unitary(2, rng)
    full = np.kron(np.kron(np.eye(2), u), np.eye(2))
    assert max_abs(qstate.apply_unitary(rho, u, [1]), full @ rho @ full.conj().T) < 1e-14


def test_apply_unitary_reversed_wire_order(rng):
    rho = qstate.random_density_matrix(2, rng)
    u = haar_unitary(4, rng)
    swap = np.eye(4)[[0, 2, 1, 3]]
    expected = swap @ u @ swap
    assert max_abs(qstate.apply_unitary(rho, u, [1, 0]), expected @ rho @ expected.conj().T) < 1e-14


def test_apply_unitary_rejects_non_unitary_and_collisions():
    with pytest.raises(qstate.UnitarityError):
        qstate.apply_unitary(G, np.diag([1.0, 0.5]), [0])
    with pytest.raises(qstate.WireError):
        qstate.apply_unitary(np.kron(G, G), np.eye(4), [0, 0])
    with pytest.raises(qstate.WireError):
        qstate.apply_unitary(G, X, [1])


def test_apply_kraus_identity_and_full_decay(rng):
    rho = qstate.random_density_matrix(1, rng)
    assert max_abs(qstate.apply_kraus(rho, [np.eye(2)], [0]), rho) < 1e-15
    assert max_abs(qstate.apply_kraus(E, damping_kraus(np.pi / 2), [0]), G) < 1e-15


def test_apply_kraus_damping_arithmetic():
    cos_theta = 0.5821725756700977
    theta = np.arccos(cos_theta)
    rho = np.diag([1 - 0.2689414213699951, 0.2689414213699951])
    out = qstate.apply_kraus(rho, damping_kraus(theta), [0], validate=True)
    assert abs(qstate.excited_population(out) - 0.09115094645819656) < 1e-14


def test_apply_kraus_rejects_incomplete_set():
    with pytest.raises(qstate.IncompleteKrausError):
        qstate.apply_kraus(G, [np.diag([1.0, 0.5])], [0])


def test_excited_population_thermal():
    assert qstate.excited_population(G) == 0
    assert qstate.excited_population(E) == 1
    assert abs(qstate.excited_population(qstate.thermal_state(1.0, 1.0)) - 0.2689414213699951) < 1e-15


def test_excited_population_clamps_roundoff():
    rho = np.diag([1 + 1e-16, -1e-16]).astype(complex)
    assert qstate.excited_population(rho) == 0.0


def test_trace_distance_examples(rng):
    rho = qstate.random_density_matrix(1, rng)
    assert qstate.trace_distance(rho, rho) < 1e-15
    assert abs(qstate.trace_distance(G, E) - 1) < 1e-15
    assert abs(qstate.trace_distance(np.diag([0.7, 0.3]), np.diag([0.5, 0.5])) - 0.2) < 1e-15
    with pytest.raises(qstate.QStateError):
        qstate.trace_distance(G, np.kron(G, G))


def test_check_density_matrix_catches_each_invariant():
    with pytest.raises(qstate.InvalidStateError):
        qstate.check_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(qstate.InvalidStateError):
        qstate.check_density_matrix(np.diag([0.5, 0.6]))
    with pytest.raises(qstate.InvalidStateError):
        qstate.check_density_matrix(np.diag([1.1, -0.1]))


def test_strict_mode_validates_outputs():
    bad = np.diag([1.0, 0.5]).astype(complex)
    qstate.apply_unitary(bad, np.eye(2), [0])  # not validated by default
    with qstate.strict_mode():
        with pytest.raises(qstate.InvalidStateError):
            qstate.apply_unitary(bad, np.eye(2), [0])
    assert not qstate.is_strict()


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 4))
def test_unitary_preserves_spectrum_and_validity(seed, n):
    rng = np.random.default_rng(seed)
    rho = qstate.random_density_matrix(n, rng)
    k = int(rng.integers(1, n + 1))
    wires = list(rng.permutation(n)[:k])
    out = qstate.apply_unitary(rho, haar_unitary(2**k, rng), wires, validate=True)
    assert max_abs(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=seeds, na=st.integers(1, 3), nb=st.integers(1, 3))
def test_partial_trace_inverts_tensor_product(seed, na, nb):
    rng = np.random.default_rng(seed)
    a, b = qstate.random_density_matrix(na, rng), qstate.random_density_matrix(nb, rng)
    ab = qstate.tensor_product(a, b, validate=True)
    assert max_abs(qstate.partial_trace(ab, range(na, na + nb), validate=True), a) < 1e-12
    assert max_abs(qstate.partial_trace(ab, range(na), validate=True), b) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=seeds, theta=st.floats(0, np.pi / 2))
def test_kraus_preserves_trace_on_embedded_wire(seed, theta):
    rng = np.random.default_rng(seed)
    rho = qstate.random_density_matrix(3, rng)
    out = qstate.apply_kraus(rho, damping_kraus(theta), [int(rng.integers(3))], validate=True)
    assert abs(np.trace(out) - 1) < 1e-12
