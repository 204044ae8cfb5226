# coding: utf-8

# # Extra work falls off as C/N
#
# With dtau fixed, more steps means a slower drive. The excess over the free
# energy difference should shrink like 1/N.

from isoqsim import BathParams, fit_power_law, scaling_sweep

bath = BathParams(beta=1.0, gamma0=1.0)
sweep = scaling_sweep(bath, 1.0, 2.0, 0.5, [4, 8, 16, 32, 64, 128])

for n, s in sweep:
    print(f"N={n:4d}  extra work {s.extra_work:.6f}  N*extra {n * s.extra_work:.4f}")


# ## Log-log fit over the upper half of the N range

fit = fit_power_law([(n, s.extra_work) for n, s in sweep])
print(f"slope {fit.slope:.4f}, C {fit.coefficient:.4f}, worst log residual {fit.residual:.2e}")


# ## Long contact: the quasi-static limit

for n in (10, 100, 1000):
    s = scaling_sweep(bath, 1.0, 2.0, 40.0, [n])[0][1]
    print(f"N={n:5d}  W - dF = {s.extra_work:.3e}   1/N = {1 / n:.3e}   ratio {s.extra_work * n:.4f}")
