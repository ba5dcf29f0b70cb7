"""Reader and writer for the small QASM dialect used by every tool in the package.

Grammar (one statement per ``;``, ``//`` comments to end of line)::

    qreg q[N];  creg c[M];
    h|x|y|z q[i];          rx|ry|rz(FLOAT) q[i];
    cx|cz|swap q[i],q[j];  cp|rzz(FLOAT) q[i],q[j];
    measure q[i] -> c[k];  if(c[k]==1) x|z q[i];
    epr q[i],q[j];

A leading ``// circuit: NAME`` comment carries the circuit name.
"""

from __future__ import annotations

import re

from .circuit import Circuit, Gate, GateKind

_SINGLE = {"h": GateKind.H, "x": GateKind.X, "y": GateKind.Y, "z": GateKind.Z}
_SINGLE_ANGLE = {"rx": GateKind.RX, "ry": GateKind.RY, "rz": GateKind.RZ}
_PAIR = {"cx": GateKind.CX, "cz": GateKind.CZ, "swap": GateKind.SWAP, "epr": GateKind.EPR_PREP}
_PAIR_ANGLE = {"cp": GateKind.CP, "rzz": GateKind.RZZ}
_CORRECTION = {"x": GateKind.CORR_X, "z": GateKind.CORR_Z}

_FLOAT = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QREF = r"q\s*\[\s*(\d+)\s*\]"
_CREF = r"c\s*\[\s*(\d+)\s*\]"

_RE_QREG = re.compile(r"^qreg\s+q\s*\[\s*(\d+)\s*\]$")
_RE_CREG = re.compile(r"^creg\s+c\s*\[\s*(\d+)\s*\]$")
_RE_MEASURE = re.compile(rf"^measure\s+{_QREF}\s*->\s*{_CREF}$")
_RE_IF = re.compile(rf"^if\s*\(\s*{_CREF}\s*==\s*1\s*\)\s*(\w+)\s+{_QREF}$")
_RE_GATE = re.compile(rf"^(\w+)\s*(?:\(\s*({_FLOAT})\s*\))?\s+(.+)$")
_RE_ARGS1 = re.compile(rf"^{_QREF}$")
_RE_ARGS2 = re.compile(rf"^{_QREF}\s*,\s*{_QREF}$")
_RE_NAME = re.compile(r"^//\s*circuit:\s*(.*?)\s*$")


class QasmError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("//", 1)[0]
        for piece in body.split(";"):
            piece = piece.strip()
            if piece:
                yield lineno, piece
        if body.strip() and not body.rstrip().endswith(";"):
            raise QasmError(lineno, "missing ';'")


def parse_qasm(text: str) -> Circuit:
    name = "circuit"
    for raw in text.splitlines():
        m = _RE_NAME.match(raw.strip())
        if m:
            name = m.group(1) or name
            break

    num_qubits: int | None = None
    num_cbits = 0
    gates: list[Gate] = []

    def qubit(lineno: int, idx: str) -> int:
        q = int(idx)
        if num_qubits is None:
            raise QasmError(lineno, "gate before qreg declaration")
        if q >= num_qubits:
            raise QasmError(lineno, f"qubit index {q} out of range for qreg q[{num_qubits}]")
        return q

    def cbit(lineno: int, idx: str) -> int:
        k = int(idx)
        if k >= num_cbits:
            raise QasmError(lineno, f"classical bit {k} out of range for creg c[{num_cbits}]")
        return k

    for lineno, stmt in _statements(text):
        if stmt.startswith("OPENQASM") or stmt.startswith("include"):
            continue
        if m := _RE_QREG.match(stmt):
            if num_qubits is not None:
                raise QasmError(lineno, "qreg declared twice")
            num_qubits = int(m.group(1))
            continue
        if m := _RE_CREG.match(stmt):
            num_cbits = int(m.group(1))
            continue
        if m := _RE_MEASURE.match(stmt):
            gates.append(Gate(GateKind.MEASURE, (qubit(lineno, m.group(1)),), cbit=cbit(lineno, m.group(2))))
            continue
        if m := _RE_IF.match(stmt):
            op = m.group(2)
            if op not in _CORRECTION:
                raise QasmError(lineno, f"conditional gate must be x or z, got {op!r}")
            gates.append(
                Gate(_CORRECTION[op], (qubit(lineno, m.group(3)),), cbit=cbit(lineno, m.group(1)))
            )
            continue
        m = _RE_GATE.match(stmt)
        if not m:
            raise QasmError(lineno, f"syntax error in {stmt!r}")
        op, angle, args = m.group(1), m.group(2), m.group(3).strip()
        if op in _SINGLE or op in _SINGLE_ANGLE:
            kind = _SINGLE.get(op) or _SINGLE_ANGLE[op]
            am = _RE_ARGS1.match(args)
            if not am:
                raise QasmError(lineno, f"{op} expects one qubit argument")
            operands = (qubit(lineno, am.group(1)),)
        elif op in _PAIR or op in _PAIR_ANGLE:
            kind = _PAIR.get(op) or _PAIR_ANGLE[op]
            am = _RE_ARGS2.match(args)
            if not am:
                raise QasmError(lineno, f"{op} expects two qubit arguments")
            operands = (qubit(lineno, am.group(1)), qubit(lineno, am.group(2)))
            if operands[0] == operands[1]:
                raise QasmError(lineno, f"{op} on repeated qubit {operands[0]}")
        else:
            raise QasmError(lineno, f"unknown gate {op!r}")
        if kind.parametric != (angle is not None):
            raise QasmError(lineno, f"{op} {'needs' if kind.parametric else 'takes no'} angle")
        gates.append(Gate(kind, operands, float(angle) if angle is not None else None))

    if num_qubits is None:
        raise QasmError(1, "missing qreg declaration")
    return Circuit(num_qubits, num_cbits, tuple(gates), name)


def _format_gate(g: Gate) -> str:
    qs = ",".join(f"q[{q}]" for q in g.qubits)
    if g.kind is GateKind.MEASURE:
        return f"measure {qs} -> c[{g.cbit}];"
    if g.kind in (GateKind.CORR_X, GateKind.CORR_Z):
        op = "x" if g.kind is GateKind.CORR_X else "z"
        return f"if(c[{g.cbit}]==1) {op} {qs};"
    if g.param is not None:
        # repr is the shortest exact round-trip form
        return f"{g.kind.value}({g.param!r}) {qs};"
    return f"{g.kind.value} {qs};"


def emit_qasm(circuit: Circuit) -> str:
    lines = [f"// circuit: {circuit.name}", f"qreg q[{circuit.num_qubits}];"]
    if circuit.num_cbits:
        lines.append(f"creg c[{circuit.num_cbits}];")
    lines.extend(_format_gate(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"
