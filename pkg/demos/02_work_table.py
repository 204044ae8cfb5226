# coding: utf-8

# # Mean work of the discrete isothermal process
#
# omega goes from 1 to 2 in N quench-then-thermalize steps. The mean work is
# the sum of (omega_j - omega_{j-1}) p_e(t_{j-1}).

from isoqsim import BathParams, free_energy_difference, make_schedule, run_exact, run_fully_quantum, run_hybrid_enumerate

bath = BathParams(beta=1.0, gamma0=1.0)


# ## Three routes, one number

for n in (2, 3, 4):
    for dtau in (0.5, 10.0):
        sched = make_schedule(bath, 1.0, 2.0, n, dtau)
        exact = run_exact(sched).mean_work
        hybrid = run_hybrid_enumerate(sched).mean_work
        fq = run_fully_quantum(sched).mean_work
        print(f"N={n} dtau={dtau:4.1f}  exact {exact:.6f}  hybrid {hybrid:.6f}  circuit {fq:.6f}")

print("free energy difference:", free_energy_difference(make_schedule(bath, 1.0, 2.0, 2, 0.5)))


# ## Spacing of the intermediate energies matters at the 1e-3 level

for spacing in ("geometric", "linear"):
    row = [run_exact(make_schedule(bath, 1.0, 2.0, n, 0.5, spacing)).mean_work for n in (2, 3, 4)]
    print(f"{spacing:>9}: " + "  ".join(f"{w:.6f}" for w in row))
