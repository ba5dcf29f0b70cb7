"""Circuit intermediate representation and structural metrics."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence


class GateKind(enum.Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    CP = "cp"
    RZZ = "rzz"
    SWAP = "swap"
    MEASURE = "measure"
    CORR_X = "corr_x"
    CORR_Z = "corr_z"
    EPR_PREP = "epr"

    @property
    def num_qubits(self) -> int:
        return 2 if self in TWO_QUBIT_KINDS else 1

    @property
    def parametric(self) -> bool:
        return self in PARAMETRIC_KINDS

    @property
    def bookkeeping(self) -> bool:
        return self in BOOKKEEPING_KINDS


TWO_QUBIT_KINDS = frozenset(
    {GateKind.CX, GateKind.CZ, GateKind.CP, GateKind.RZZ, GateKind.SWAP, GateKind.EPR_PREP}
)
PARAMETRIC_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CP, GateKind.RZZ})
BOOKKEEPING_KINDS = frozenset(
    {GateKind.EPR_PREP, GateKind.MEASURE, GateKind.CORR_X, GateKind.CORR_Z}
)
CONTROLLED_KINDS = frozenset({GateKind.CX, GateKind.CZ, GateKind.CP})
# diagonal in the computational basis, so they commute with each other
DIAGONAL_KINDS = frozenset({GateKind.Z, GateKind.RZ, GateKind.CZ, GateKind.CP, GateKind.RZZ})
# CZ and CP are symmetric in their two operands
SYMMETRIC_KINDS = frozenset({GateKind.CZ, GateKind.CP, GateKind.RZZ, GateKind.SWAP})


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    param: float | None = None
    cbit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != self.kind.num_qubits:
            raise CircuitError(
                f"{self.kind.value} takes {self.kind.num_qubits} qubit(s), got {len(self.qubits)}"
            )
        if len(self.qubits) == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"{self.kind.value} on repeated qubit {self.qubits[0]}")
        if self.kind.parametric:
            if self.param is None or not math.isfinite(self.param):
                raise CircuitError(f"{self.kind.value} needs a finite angle, got {self.param}")
            object.__setattr__(self, "param", float(self.param))
        elif self.param is not None:
            raise CircuitError(f"{self.kind.value} takes no angle")
        needs_cbit = self.kind in (GateKind.MEASURE, GateKind.CORR_X, GateKind.CORR_Z)
        if needs_cbit and self.cbit is None:
            raise CircuitError(f"{self.kind.value} needs a classical bit")
        if not needs_cbit and self.cbit is not None:
            raise CircuitError(f"{self.kind.value} takes no classical bit")

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def remap(self, mapping) -> "Gate":
        """Same gate acting on ``mapping[q]`` for every operand."""
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.param, self.cbit)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_cbits: int = 0
    gates: tuple[Gate, ...] = ()
    name: str = "circuit"

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 0 or self.num_cbits < 0:
            raise CircuitError("register sizes must be non-negative")
        for i, g in enumerate(self.gates):
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CircuitError(
                        f"gate {i} ({g.kind.value}) uses qubit {q} outside 0..{self.num_qubits - 1}"
                    )
            if g.cbit is not None and not 0 <= g.cbit < self.num_cbits:
                raise CircuitError(
                    f"gate {i} ({g.kind.value}) uses classical bit {g.cbit} "
                    f"outside 0..{self.num_cbits - 1}"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def with_gates(self, gates: Iterable[Gate], **changes) -> "Circuit":
        return Circuit(
            changes.get("num_qubits", self.num_qubits),
            changes.get("num_cbits", self.num_cbits),
            tuple(gates),
            changes.get("name", self.name),
        )

    def append(self, gate: Gate) -> "Circuit":
        return self.with_gates(self.gates + (gate,))

    def two_qubit_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.is_two_qubit]

    def interaction_pairs(self) -> list[tuple[int, int]]:
        """Sorted operand pairs of every non-bookkeeping two-qubit gate, in program order."""
        return [
            tuple(sorted(g.qubits))
            for g in self.gates
            if g.is_two_qubit and not g.kind.bookkeeping
        ]


class Accounting(enum.Enum):
    SWAP_AS_ONE = "SwapAsOne"
    SWAP_AS_THREE_CX = "SwapAsThreeCX"

    @classmethod
    def parse(cls, value: "str | Accounting") -> "Accounting":
        if isinstance(value, cls):
            return value
        for member in cls:
            if value.lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ValueError(f"unknown gate accounting {value!r}")


def gate_count(
    circuit: Circuit,
    accounting: Accounting | str = Accounting.SWAP_AS_ONE,
    include_bookkeeping: bool = True,
) -> int:
    accounting = Accounting.parse(accounting)
    swap_weight = 3 if accounting is Accounting.SWAP_AS_THREE_CX else 1
    total = 0
    for g in circuit.gates:
        if g.kind.bookkeeping and not include_bookkeeping:
            continue
        total += swap_weight if g.kind is GateKind.SWAP else 1
    return total


def depth(circuit: Circuit) -> int:
    """ASAP layer count; gates sharing a qubit or a classical bit serialize."""
    qubit_level = [0] * circuit.num_qubits
    cbit_level = [0] * circuit.num_cbits
    result = 0
    for g in circuit.gates:
        level = max(qubit_level[q] for q in g.qubits)
        if g.cbit is not None:
            level = max(level, cbit_level[g.cbit])
        level += 1
        for q in g.qubits:
            qubit_level[q] = level
        if g.cbit is not None:
            cbit_level[g.cbit] = level
        result = max(result, level)
    return result


def relabel(circuit: Circuit, mapping: Sequence[int] | dict[int, int], num_qubits: int | None = None) -> Circuit:
    """Apply a qubit relabeling; ``mapping[old] = new``."""
    width = circuit.num_qubits if num_qubits is None else num_qubits
    return circuit.with_gates((g.remap(mapping) for g in circuit.gates), num_qubits=width)


# builder shorthands


def h(q):
    return Gate(GateKind.H, (q,))


def x(q):
    return Gate(GateKind.X, (q,))


def rx(theta, q):
    return Gate(GateKind.RX, (q,), theta)


def rz(theta, q):
    return Gate(GateKind.RZ, (q,), theta)


def cx(c, t):
    return Gate(GateKind.CX, (c, t))


def cz(a, b):
    return Gate(GateKind.CZ, (a, b))


def cp(theta, a, b):
    return Gate(GateKind.CP, (a, b), theta)


def rzz(theta, a, b):
    return Gate(GateKind.RZZ, (a, b), theta)


def swap(a, b):
    return Gate(GateKind.SWAP, (a, b))


def measure(q, c):
    return Gate(GateKind.MEASURE, (q,), cbit=c)


def corr_x(q, c):
    return Gate(GateKind.CORR_X, (q,), cbit=c)


def corr_z(q, c):
    return Gate(GateKind.CORR_Z, (q,), cbit=c)


def epr(a, b):
    return Gate(GateKind.EPR_PREP, (a, b))
