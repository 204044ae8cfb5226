# coding: utf-8

# # One isochoric step
#
# A qubit with gap omega touches a bath at inverse temperature beta for a time
# dtau. The step is a generalized amplitude damping channel. Here we check it
# against direct integration of the master equation.

import numpy as np

from isoqsim import channels as ch
from isoqsim import qstate

bath = ch.BathParams(beta=1.0, gamma0=1.0)
step = ch.make_step_params(bath, omega=1.5, delta_tau=0.5)
print("cos(theta) =", np.cos(step.theta))
print("p_up, p_down =", step.p_up, step.p_down)


# ## Start from the Gibbs state at omega = 1 and quench to 1.5

rho = qstate.thermal_state(bath.beta, 1.0)
after = ch.apply_gadc(rho, step)
print("p_e before:", qstate.excited_population(rho))
print("p_e after :", qstate.excited_population(after))
print("p_e target:", qstate.thermal_populations(bath.beta, 1.5)[1])


# ## Same step from the master equation

me = ch.evolve_master_equation(rho, 1.5, bath, 0.5)
print("max |Kraus - RK4| =", np.abs(after - me).max())


# ## Longer contact times approach the Gibbs state

for dtau in (0.1, 0.5, 2.0, 10.0):
    out = ch.apply_gadc(rho, ch.make_step_params(bath, 1.5, dtau))
    gap = qstate.trace_distance(out, qstate.thermal_state(bath.beta, 1.5))
    print(f"dtau={dtau:5.1f}  distance to Gibbs = {gap:.3e}")
