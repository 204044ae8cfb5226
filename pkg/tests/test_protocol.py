import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoqsim import protocol as pr
from isoqsim.channels import BathParams

from conftest import max_abs

DELTA_F = 0.18633367647525056

# exact mean work for omega 1 -> 2, beta = gamma0 = 1, geometric spacing
TABLE = {
    (2, 0.5): 0.244868,
    (2, 10.0): 0.225962,
    (3, 0.5): 0.232426,
    (3, 10.0): 0.212311,
    (4, 0.5): 0.224309,
    (4, 10.0): 0.205646,
}


def test_schedules_endpoints_and_spacing(unit_bath):
    lin = pr.linear_schedule(unit_bath, 1.0, 2.0, 4, 0.5)
    geo = pr.geometric_schedule(unit_bath, 1.0, 2.0, 4, 0.5)
    assert lin.omegas == (1.0, 1.25, 1.5, 1.75, 2.0)
    assert geo.omegas[0] == 1.0 and geo.omegas[-1] == 2.0
    ratios = np.array(geo.omegas[1:]) / np.array(geo.omegas[:-1])
    assert max_abs(ratios, 2 ** 0.25) < 1e-15
    assert geo.num_steps == 4 and geo.total_time == 2.0
    assert pr.make_schedule(unit_bath, 1.0, 2.0, 4, 0.5).omegas == geo.omegas


def test_schedule_validation(unit_bath):
    with pytest.raises(ValueError):
        pr.Schedule(unit_bath, (1.0,), 0.5)
    with pytest.raises(ValueError):
        pr.Schedule(unit_bath, (1.0, 0.0), 0.5)
    with pytest.raises(ValueError):
        pr.Schedule(unit_bath, (1.0, 2.0), 0.5, tau_adi=0.1)
    with pytest.raises(ValueError):
        pr.make_schedule(unit_bath, 1.0, 2.0, 0, 0.5)
    with pytest.raises(ValueError):
        pr.make_schedule(unit_bath, 1.0, 2.0, 2, 0.5, spacing="cubic")


def test_free_energy_difference(unit_bath):
    sched = pr.make_schedule(unit_bath, 1.0, 2.0, 3, 0.5)
    assert abs(pr.free_energy_difference(sched) - DELTA_F) < 1e-15
    # F = -T log Z with Z = 1 + exp(-beta omega)
    f = lambda w: -np.log(1 + np.exp(-w))  # noqa: E731
    assert abs(f(2.0) - f(1.0) - DELTA_F) < 1e-15


@pytest.mark.parametrize("key", sorted(TABLE))
def test_exact_work_table(unit_bath, key):
    n, dtau = key
    s = pr.run_exact(pr.make_schedule(unit_bath, 1.0, 2.0, n, dtau))
    assert abs(s.mean_work - TABLE[key]) < 1e-6
    assert abs(s.mean_work - sum(s.step_works)) < 1e-15
    assert abs(s.extra_work - (s.mean_work - DELTA_F)) < 1e-15


def test_first_step_work_uses_initial_gibbs_population(unit_bath):
    s = pr.run_exact(pr.linear_schedule(unit_bath, 1.0, 2.0, 2, 0.5))
    assert abs(s.step_works[0] - 0.5 * 0.2689414213699951) < 1e-15
    assert abs(s.populations[1] - 0.22179974300703323) < 1e-14


def test_constant_energy_costs_nothing(unit_bath):
    s = pr.run_exact(pr.Schedule(unit_bath, (1.3, 1.3, 1.3), 0.5))
    assert s.mean_work == 0 and s.delta_F == 0


def test_long_contact_reaches_quasi_static_limit(unit_bath):
    s = pr.run_exact(pr.make_schedule(unit_bath, 1.0, 2.0, 2000, 40.0))
    assert abs(s.mean_work - DELTA_F) < 1e-3


def test_enumeration_structure(unit_bath):
    sched = pr.make_schedule(unit_bath, 1.0, 2.0, 3, 0.5)
    recs = pr.enumerate_trajectories(sched)
    assert [r.selections for r in recs] == ["ddd", "ddu", "dud", "duu", "udd", "udu", "uud", "uuu"]
    assert abs(sum(r.probability for r in recs) - 1) < 1e-15
    steps = sched.step_params()
    assert abs(recs[0].probability - np.prod([s.p_down for s in steps])) < 1e-15
    with pytest.raises(ValueError):
        pr.enumerate_trajectories(pr.make_schedule(unit_bath, 1.0, 2.0, 5, 0.5), max_steps=4)


@pytest.mark.parametrize("n,dtau", [(1, 0.5), (2, 0.5), (3, 10.0), (5, 1.3)])
def test_modes_agree(unit_bath, n, dtau):
    sched = pr.make_schedule(unit_bath, 1.0, 2.0, n, dtau)
    exact = pr.run_exact(sched).mean_work
    assert abs(pr.run_hybrid_enumerate(sched).mean_work - exact) < 1e-12
    for mode in ("reset", "accumulate"):
        assert abs(pr.run_fully_quantum(sched, ancilla_mode=mode).mean_work - exact) < 1e-12


def test_run_hybrid_switches_to_sampling(unit_bath):
    small = pr.make_schedule(unit_bath, 1.0, 2.0, 3, 0.5)
    assert pr.run_hybrid(small).mode == "hybrid-enumerate"
    big = pr.make_schedule(unit_bath, 1.0, 2.0, pr.HYBRID_ENUMERATION_LIMIT + 1, 0.5)
    s = pr.run_hybrid(big, num_trajectories=2000, seed=4)
    assert s.mode == "hybrid-montecarlo"
    assert abs(s.mean_work - pr.run_exact(big).mean_work) < 5 * s.work_stderr


def test_montecarlo_converges_and_is_reproducible(unit_bath):
    sched = pr.make_schedule(unit_bath, 1.0, 2.0, 2, 0.5)
    a = pr.run_hybrid_montecarlo(sched, 20000, seed=7)
    b = pr.run_hybrid_montecarlo(sched, 20000, seed=7)
    assert a.mean_work == b.mean_work
    assert abs(a.mean_work - TABLE[(2, 0.5)]) < 5 * a.work_stderr
    assert pr.run_hybrid_montecarlo(sched, 1, seed=7).work_stderr is None
    with pytest.raises(ValueError):
        pr.run_hybrid_montecarlo(sched, 0)


def test_shot_mode_reproducible_and_unbiased(unit_bath):
    sched = pr.make_schedule(unit_bath, 1.0, 2.0, 2, 0.5)
    a = pr.run_fully_quantum(sched, shots=8192, seed=3)
    b = pr.run_fully_quantum(sched, shots=8192, seed=3)
    assert a.mean_work == b.mean_work and a.shots == 8192
    assert abs(a.mean_work - TABLE[(2, 0.5)]) < 5 * a.work_stderr
    assert pr.run_fully_quantum(sched, shots=8192, seed=4).mean_work != a.mean_work


def test_child_seeds():
    seeds = pr.child_seeds(5, 4)
    assert len(set(seeds)) == 4
    assert seeds == pr.child_seeds(5, 4)
    assert pr.child_seeds(None, 2) == [None, None]


def test_fit_power_law_exact_inverse():
    fit = pr.fit_power_law([(n, 3.0 / n) for n in (4, 8, 16, 32, 64)])
    assert abs(fit.slope + 1) < 1e-12
    assert abs(fit.coefficient - 3) < 1e-12
    assert [n for n, _ in fit.fit_points] == [16, 32, 64]


def test_fit_power_law_with_correction():
    fit = pr.fit_power_law([(n, 3.0 / n + 1.0 / n**2) for n in (4, 8, 16, 32, 64)])
    assert -1.05 <= fit.slope <= -0.95


def test_fit_power_law_needs_enough_positive_points():
    with pytest.raises(ValueError):
        pr.fit_power_law([(4, 1.0), (8, 0.5), (16, 0.25)])
    with pytest.raises(ValueError):
        pr.fit_power_law([(4, 1.0), (8, 0.5), (16, 0.0), (32, 0.1)])


def test_scaling_sweep_decreasing(unit_bath):
    sweep = pr.scaling_sweep(unit_bath, 1.0, 2.0, 0.5, [4, 8, 16])
    extra = [s.extra_work for _, s in sweep]
    assert extra[0] > extra[1] > extra[2] > 0
    with pytest.raises(ValueError):
        pr.scaling_sweep(unit_bath, 1.0, 2.0, 0.5, [8, 4])


@settings(max_examples=60, deadline=None)
@given(
    omegas=st.lists(st.floats(0.1, 5.0), min_size=2, max_size=8),
    dtau=st.floats(0.0, 20.0),
    beta=st.floats(0.2, 5.0),
)
def test_second_law(omegas, dtau, beta):
    s = pr.run_exact(pr.Schedule(BathParams(beta, 1.0), tuple(omegas), dtau))
    assert s.mean_work >= s.delta_F - 1e-12


def test_identity_channels_give_noiseless_estimates(unit_bath):
    sched = pr.make_schedule(unit_bath, 1.0, 2.0, 3, 0.0)
    recs = pr.enumerate_trajectories(sched)
    assert max(r.work for r in recs) - min(r.work for r in recs) < 1e-15
    mc = pr.run_hybrid_montecarlo(sched, 500, seed=2)
    assert mc.work_stderr < 1e-15
    assert abs(mc.mean_work - pr.run_exact(sched).mean_work) < 1e-14


def test_final_population_agrees_across_modes(unit_bath):
    sched = pr.make_schedule(unit_bath, 1.0, 2.0, 3, 0.5)
    ref = pr.run_exact(sched).final_population
    assert abs(pr.run_hybrid_enumerate(sched).final_population - ref) < 1e-14
    assert abs(pr.run_fully_quantum(sched).final_population - ref) < 1e-14
    mc = pr.run_hybrid_montecarlo(sched, 20000, seed=3)
    assert abs(mc.final_population - ref) < 0.01
    shots = pr.run_fully_quantum(sched, shots=8192, seed=3)
    assert abs(shots.final_population - ref) < 5 * np.sqrt(ref * (1 - ref) / 8192)


def test_extra_work_small_n(unit_bath):
    sweep = pr.scaling_sweep(unit_bath, 1.0, 2.0, 0.5, [2, 3, 4])
    assert max_abs([s.extra_work for _, s in sweep], [0.059, 0.046, 0.038]) < 5e-4


def test_longer_contact_costs_less_work(unit_bath):
    ns = [2, 4, 8, 16, 32]
    fast = pr.scaling_sweep(unit_bath, 1.0, 2.0, 0.5, ns)
    slow = pr.scaling_sweep(unit_bath, 1.0, 2.0, 10.0, ns)
    assert all(b.extra_work < a.extra_work for (_, a), (_, b) in zip(fast, slow))
