# coding: utf-8

# # The process as a gate circuit
#
# Each step becomes a selector rotation plus controlled damping and pumping
# gates on fresh ancillas. We simulate the circuit, sample shots, and write
# OpenQASM 2.0.

import numpy as np

from isoqsim import BathParams, make_schedule
from isoqsim import circuit as cq
from isoqsim import qasm, qstate
from isoqsim.protocol import process_circuit, run_exact

bath = BathParams(beta=1.0, gamma0=1.0)
sched = make_schedule(bath, 1.0, 2.0, 2, 0.5)


# ## Accumulate mode: 2N+1 wires, all starting in |0>

circ = process_circuit(sched, ancilla_mode="accumulate", preparation="coherent")
print("wires:", circ.num_wires, "gates:", len(circ.gates))
print("p_e at each time:", np.round(cq.step_populations(circ), 6))
print("exact populations:", np.round(run_exact(sched).populations, 6))


# ## Reset mode reuses two ancillas

small = process_circuit(sched, ancilla_mode="reset", preparation="coherent")
print("reset-mode wires:", small.num_wires)
print("same final p_e:", abs(cq.step_populations(small)[-1] - cq.step_populations(circ)[-1]) < 1e-12)


# ## Shots

for seed in range(3):
    r = cq.sample_counts(cq.prefix(circ, 1), shots=8192, seed=seed)
    print(f"seed {seed}: {r.excited_count}/{r.shots} excited -> {r.p_e_estimate:.4f}")


# ## OpenQASM round trip

text = qasm.export_qasm(cq.prefix(circ, 1))
print(text.splitlines()[:6])
prog = qasm.parse_qasm(text)
print("primitive count:", len(prog.primitives))
print("round-trip p_e:", qstate.excited_population(prog.simulate()))
