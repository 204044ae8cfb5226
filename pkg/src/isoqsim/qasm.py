"""OpenQASM 2.0 export of process circuits, and a reader for the same subset.

Gates are lowered to ``x``, ``rx``, ``ry``, ``rz``, ``cx`` and ``reset``.
The lowering is exact up to a global phase:

* controlled ``RY(t)``: ``ry(t/2); cx; ry(-t/2); cx``
* control on ``|0>``: ``x`` on the control before and after
* doubly controlled ``RY``: the two-control construction with half angles
* doubly controlled ``X``: the standard Toffoli network, with ``H`` written
  as ``ry(pi/2)`` followed by ``x`` and ``T`` written as ``rz(pi/4)``
* free evolution ``diag(1, exp(-i w dt))``: ``rz(-w dt)``
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import qstate
from .circuit import (
    FREE_EVOLUTION,
    NOT,
    RESET,
    ROT_X,
    ROT_Y,
    Circuit,
    Gate,
    run_gates,
    rx_matrix,
    ry_matrix,
    rz_matrix,
)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


class QasmExportError(ValueError):
    pass


@dataclass(frozen=True)
class Primitive:
    """One hardware-level instruction: ``name`` acting on ``wires``."""

    name: str
    wires: tuple[int, ...]
    angle: float | None = None

    def matrix(self) -> np.ndarray:
        if self.name == "x":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.name == "rx":
            return rx_matrix(self.angle)
        if self.name == "ry":
            return ry_matrix(self.angle)
        if self.name == "rz":
            return rz_matrix(self.angle)
        if self.name == "cx":
            return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
        raise ValueError(f"{self.name} has no matrix")


def _cry(angle, c, t):
    return [
        Primitive("ry", (t,), angle / 2),
        Primitive("cx", (c, t)),
        Primitive("ry", (t,), -angle / 2),
        Primitive("cx", (c, t)),
    ]


def _ccry(angle, c1, c2, t):
    return [
        *_cry(angle / 2, c2, t),
        Primitive("cx", (c1, c2)),
        *_cry(-angle / 2, c2, t),
        Primitive("cx", (c1, c2)),
        *_cry(angle / 2, c1, t),
    ]


def _h(q):
    return [Primitive("ry", (q,), math.pi / 2), Primitive("x", (q,))]


def _t(q, sign=1):
    return [Primitive("rz", (q,), sign * math.pi / 4)]


def _ccx(c1, c2, t):
    cx = lambda a, b: [Primitive("cx", (a, b))]  # noqa: E731
    return [
        *_h(t),
        *cx(c2, t), *_t(t, -1),
        *cx(c1, t), *_t(t),
        *cx(c2, t), *_t(t, -1),
        *cx(c1, t), *_t(c2), *_t(t),
        *_h(t),
        *cx(c1, c2), *_t(c1), *_t(c2, -1),
        *cx(c1, c2),
    ]


def lower_gate(gate: Gate) -> list[Primitive]:
    if gate.kind == RESET:
        return [Primitive("reset", (gate.target,))]
    flips = [Primitive("x", (w,)) for w, s in gate.controls if s == 0]
    ctrl = [w for w, _ in gate.controls]
    t = gate.target
    if gate.kind == NOT:
        body = {0: lambda: [Primitive("x", (t,))], 1: lambda: [Primitive("cx", (ctrl[0], t))], 2: lambda: _ccx(*ctrl, t)}
    elif gate.kind == ROT_Y:
        a = gate.params[0]
        body = {0: lambda: [Primitive("ry", (t,), a)], 1: lambda: _cry(a, ctrl[0], t), 2: lambda: _ccry(a, *ctrl, t)}
    elif gate.kind == ROT_X:
        body = {0: lambda: [Primitive("rx", (t,), gate.params[0])]}
    elif gate.kind == FREE_EVOLUTION:
        omega, dtau = gate.params
        body = {0: lambda: [Primitive("rz", (t,), -omega * dtau)]}
    else:  # pragma: no cover - Gate validates kinds
        raise QasmExportError(gate.kind)
    if len(ctrl) not in body:
        raise QasmExportError(f"no decomposition for {gate.kind} with {len(ctrl)} controls")
    return flips + body[len(ctrl)]() + flips


def lower(gates) -> list[Primitive]:
    out = []
    for g in gates:
        out += lower_gate(g)
    return out


def run_primitives(rho: np.ndarray, prims) -> np.ndarray:
    for p in prims:
        if p.name == "reset":
            rho = run_gates(rho, [Gate(RESET, p.wires[0])])
        else:
            rho = qstate.apply_unitary(rho, p.matrix(), list(p.wires))
    return rho


def _fmt(angle: float) -> str:
    return repr(float(angle))


def export_qasm(circuit: Circuit) -> str:
    """OpenQASM 2.0 program for ``circuit`` measuring ``circuit.measure_wire`` into ``c[0]``."""
    if not circuit.has_ground_initial_states():
        raise QasmExportError(
            "hardware registers start in |0>; prepare non-ground initial states with gates "
            "(e.g. preparation='coherent')"
        )
    lines = [HEADER.rstrip("\n"), f"qreg q[{circuit.num_wires}];", "creg c[1];"]
    for p in lower(circuit.gates):
        args = ",".join(f"q[{w}]" for w in p.wires)
        if p.angle is None:
            lines.append(f"{p.name} {args};")
        else:
            lines.append(f"{p.name}({_fmt(p.angle)}) {args};")
    lines.append(f"measure q[{circuit.measure_wire}] -> c[0];")
    return "\n".join(lines) + "\n"


_LINE = re.compile(r"^(\w+)(?:\(([^)]*)\))?\s+(.+);$")
_QUBIT = re.compile(r"q\[(\d+)\]")


@dataclass(frozen=True)
class QasmProgram:
    num_wires: int
    primitives: tuple[Primitive, ...]
    measure_wire: int | None

    def simulate(self) -> np.ndarray:
        rho = qstate.basis_state([0] * self.num_wires)
        return run_primitives(rho, self.primitives)


def parse_qasm(text: str) -> QasmProgram:
    """Read back the subset of OpenQASM 2.0 that :func:`export_qasm` writes."""
    num_wires = None
    prims = []
    measure = None
    for raw in text.splitlines():
        line = raw.split("//")[0].strip()
        if not line or line.startswith(("OPENQASM", "include", "creg", "barrier")):
            continue
        if line.startswith("qreg"):
            num_wires = int(re.search(r"\[(\d+)\]", line).group(1))
            continue
        if line.startswith("measure"):
            measure = int(_QUBIT.search(line).group(1))
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"cannot parse line {raw!r}")
        name, arg, operands = m.groups()
        wires = tuple(int(w) for w in _QUBIT.findall(operands))
        angle = None if arg is None else float(arg)
        prims.append(Primitive(name, wires, angle))
    if num_wires is None:
        raise ValueError("no qreg declaration")
    return QasmProgram(num_wires, tuple(prims), measure)
