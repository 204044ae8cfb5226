# coding: utf-8

# # Hybrid scheme: classical randomness picks the channel
#
# At each step a uniform draw chooses damping (probability p_down) or pumping.
# Averaging over all 2^N branch strings recovers the exact channel.

from isoqsim import BathParams, make_schedule, run_exact, run_hybrid_montecarlo
from isoqsim.protocol import enumerate_trajectories

bath = BathParams(beta=1.0, gamma0=1.0)
sched = make_schedule(bath, 1.0, 2.0, 2, 0.5)

for rec in enumerate_trajectories(sched):
    print(f"{rec.selections}  prob {rec.probability:.4f}  work {rec.work:.6f}")


# ## Sampling instead of enumerating

exact = run_exact(sched).mean_work
for n in (100, 1_000, 10_000, 100_000):
    mc = run_hybrid_montecarlo(sched, n, seed=1)
    z = (mc.mean_work - exact) / mc.work_stderr
    print(f"{n:7d} trajectories  W = {mc.mean_work:.5f} +/- {mc.work_stderr:.5f}  z = {z:+.2f}")

print("exact:", exact)
