"""QFT and QAOA benchmark circuits."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

import networkx as nx

from .circuit import Circuit, cp, h, rx, rzz, swap


class GraphFamily(enum.Enum):
    RING = "Ring"
    THREE_REGULAR = "ThreeRegular"
    ERDOS_RENYI = "ErdosRenyi"

    @classmethod
    def parse(cls, value: "str | GraphFamily") -> "GraphFamily":
        if isinstance(value, cls):
            return value
        key = value.lower().replace("-", "").replace("_", "")
        for member in cls:
            if key in (member.value.lower(), member.name.lower().replace("_", "")):
                return member
        raise ValueError(f"unknown graph family {value!r}")


@dataclass(frozen=True)
class ProblemGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    family: GraphFamily
    seed: int = 0
    p: float | None = None

    def __post_init__(self):
        norm = sorted({(min(u, v), max(u, v)) for u, v in self.edges})
        if len(norm) != len(self.edges):
            raise ValueError("problem graph has duplicate edges")
        for u, v in norm:
            if u == v or not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"bad edge ({u}, {v})")
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def ring(cls, n: int) -> "ProblemGraph":
        if n < 3:
            raise ValueError("a ring needs at least 3 vertices")
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)), GraphFamily.RING)

    @classmethod
    def three_regular(cls, n: int, seed: int = 0) -> "ProblemGraph":
        if n % 2 or n < 4:
            raise ValueError("a 3-regular graph needs an even vertex count >= 4")
        g = nx.random_regular_graph(3, n, seed=seed)
        return cls(n, tuple(g.edges()), GraphFamily.THREE_REGULAR, seed)

    @classmethod
    def erdos_renyi(cls, n: int, p: float, seed: int = 0) -> "ProblemGraph":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"edge probability must be in [0, 1], got {p}")
        g = nx.gnp_random_graph(n, p, seed=seed)
        return cls(n, tuple(g.edges()), GraphFamily.ERDOS_RENYI, seed, p)

    @classmethod
    def build(cls, family: "GraphFamily | str", n: int, seed: int = 0, p: float | None = None) -> "ProblemGraph":
        family = GraphFamily.parse(family)
        if family is GraphFamily.RING:
            return cls.ring(n)
        if family is GraphFamily.THREE_REGULAR:
            return cls.three_regular(n, seed)
        return cls.erdos_renyi(n, 0.5 if p is None else p, seed)

    @property
    def is_complete(self) -> bool:
        n = self.num_vertices
        return len(self.edges) == n * (n - 1) // 2


def qft(n: int, reverse_swaps: bool = False) -> Circuit:
    if n < 1:
        raise ValueError("qft needs at least one qubit")
    gates = []
    for i in range(n):
        gates.append(h(i))
        for j in range(i + 1, n):
            gates.append(cp(math.pi / 2 ** (j - i), j, i))
    if reverse_swaps:
        gates.extend(swap(i, n - 1 - i) for i in range(n // 2))
    return Circuit(n, 0, tuple(gates), f"qft{n}")


def qaoa_angles(p: int, seed: int) -> list[tuple[float, float]]:
    """Per-layer (gamma, beta), each strictly inside (0, pi)."""
    rng = random.Random(seed)

    def draw() -> float:
        while True:
            v = rng.random()
            if v > 0.0:
                return math.pi * v

    return [(draw(), draw()) for _ in range(p)]


def qaoa(graph: ProblemGraph, p: int = 1, seed: int = 0) -> Circuit:
    if p < 1:
        raise ValueError("qaoa needs at least one layer")
    n = graph.num_vertices
    gates = [h(q) for q in range(n)]
    for gamma, beta in qaoa_angles(p, seed):
        gates.extend(rzz(gamma, u, v) for u, v in graph.edges)
        gates.extend(rx(beta, q) for q in range(n))
    return Circuit(n, 0, tuple(gates), f"qaoa{n}_{graph.family.value}_p{p}")


def write_edge_list(path, graph: ProblemGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {graph.family.value} n={graph.num_vertices} seed={graph.seed}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(path, num_vertices: int | None = None, family: GraphFamily | str = GraphFamily.ERDOS_RENYI) -> ProblemGraph:
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {line.strip()!r}")
            edges.append((int(parts[0]), int(parts[1])))
    n = num_vertices if num_vertices is not None else 1 + max((max(e) for e in edges), default=-1)
    return ProblemGraph(n, tuple(edges), GraphFamily.parse(family))
