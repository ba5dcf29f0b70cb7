from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..circuit import Circuit, GateKind
from ..topology import CouplingGraph


class RoutingError(ValueError):
    pass


class Strategy(enum.Enum):
    GREEDY = "Greedy"
    SWAP_NETWORK = "SwapNetwork"
    SABRE = "Sabre"


class Layout:
    """Logical-to-physical assignment kept consistent in both directions."""

    def __init__(self, log2phys: Mapping[int, int] | Iterable[int]):
        if not isinstance(log2phys, Mapping):
            log2phys = dict(enumerate(log2phys))
        self.log2phys: dict[int, int] = dict(log2phys)
        self.phys2log: dict[int, int] = {p: l for l, p in self.log2phys.items()}
        if len(self.phys2log) != len(self.log2phys):
            raise RoutingError("layout maps two logical qubits to one physical node")

    def __getitem__(self, logical: int) -> int:
        return self.log2phys[logical]

    def __len__(self) -> int:
        return len(self.log2phys)

    def __eq__(self, other) -> bool:
        return isinstance(other, Layout) and self.log2phys == other.log2phys

    def __repr__(self) -> str:
        return f"Layout({self.log2phys})"

    def logical_at(self, phys: int) -> int | None:
        return self.phys2log.get(phys)

    def swap(self, p: int, q: int) -> None:
        """Exchange whatever sits on physical nodes ``p`` and ``q``."""
        a, b = self.phys2log.pop(p, None), self.phys2log.pop(q, None)
        if a is not None:
            self.log2phys[a] = q
            self.phys2log[q] = a
        if b is not None:
            self.log2phys[b] = p
            self.phys2log[p] = b

    def copy(self) -> "Layout":
        return Layout(self.log2phys)

    def as_list(self) -> list[int]:
        return [self.log2phys[i] for i in range(len(self.log2phys))]


@dataclass
class CompiledCircuit:
    circuit: Circuit
    initial_layout: Layout
    final_layout: Layout
    swap_count: int
    strategy: Strategy
    warnings: list[str] = field(default_factory=list)

    def sidecar(self) -> dict:
        return {
            "initial_layout": self.initial_layout.as_list(),
            "final_layout": self.final_layout.as_list(),
            "swap_count": self.swap_count,
            "strategy": self.strategy.value,
            "warnings": list(self.warnings),
        }

    def write_sidecar(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.sidecar(), fh, indent=2)


def conformance_violations(
    circuit: Circuit, graph: CouplingGraph, extra_pairs: Iterable[tuple[int, int]] = ()
) -> list[tuple[int, tuple[int, int]]]:
    """(gate index, operands) of every two-qubit gate not on an allowed pair."""
    allowed = set(graph.edges)
    allowed.update((min(a, b), max(a, b)) for a, b in extra_pairs)
    bad = []
    for i, g in enumerate(circuit.gates):
        if g.is_two_qubit:
            a, b = g.qubits
            if (min(a, b), max(a, b)) not in allowed:
                bad.append((i, g.qubits))
    return bad


def swap_permutation_layout(initial: Layout, circuit: Circuit) -> Layout:
    """Replay the SWAP gates of ``circuit`` on ``initial``."""
    layout = initial.copy()
    for g in circuit.gates:
        if g.kind is GateKind.SWAP:
            layout.swap(*g.qubits)
    return layout
