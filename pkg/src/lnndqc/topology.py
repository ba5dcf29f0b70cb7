"""Heavy-hex coupling graphs, their LNN reduction, and two-chip linking.

Lattice of distance ``d`` (odd, >= 3): ``d`` rows of ``2d + 1`` row qubits.
Between rows ``r`` and ``r + 1`` sit bridge qubits, each joined to the row
qubit above and below it in the same column. Even gaps use columns
``2, 6, 10, ...`` and odd gaps ``0, 4, 8, ...``, so every hexagonal cell has
twelve qubits and no node exceeds degree 3. Row width ``2d + 1`` puts a bridge
on the right end of every even gap and on the left end of every odd gap,
which is what lets a serpentine line visit every row qubit.

Node ids: row qubit ``(r, c)`` is ``r * (2d + 1) + c``; bridges follow in
(gap, column) order.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable


class TopologyError(ValueError):
    pass


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class CouplingGraph:
    num_nodes: int
    edges: frozenset[tuple[int, int]]
    labels: dict[int, tuple] | None = field(default=None, compare=False, hash=False)
    distance: int | None = field(default=None, compare=False)

    def __post_init__(self):
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise TopologyError(f"self-loop on node {u}")
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise TopologyError(f"edge ({u}, {v}) outside 0..{self.num_nodes - 1}")
            normalized.add(_edge(u, v))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(
        cls, num_nodes: int, edges: Iterable[tuple[int, int]], labels=None, distance=None
    ) -> "CouplingGraph":
        edges = list(edges)
        seen = set()
        for u, v in edges:
            e = _edge(u, v)
            if e in seen:
                raise TopologyError(f"duplicate edge {e}")
            seen.add(e)
        return cls(num_nodes, frozenset(seen), labels, distance)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def neighbors(self, node: int) -> list[int]:
        return self.adjacency[node]

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def has_edge(self, u: int, v: int) -> bool:
        return _edge(u, v) in self.edges

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def is_connected(self) -> bool:
        if self.num_nodes == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for v in self.adjacency[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.num_nodes

    def distance_matrix(self) -> list[list[int]]:
        """All-pairs hop distances by BFS; -1 marks unreachable pairs."""
        n = self.num_nodes
        dist = [[-1] * n for _ in range(n)]
        for s in range(n):
            row = dist[s]
            row[s] = 0
            frontier = [s]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in self.adjacency[u]:
                        if row[v] < 0:
                            row[v] = row[u] + 1
                            nxt.append(v)
                frontier = nxt
        return dist

    def to_json(self) -> dict:
        return {"num_nodes": self.num_nodes, "edges": [list(e) for e in sorted(self.edges)]}


# ---------------------------------------------------------------------------
# heavy-hex lattice


def row_width(d: int) -> int:
    return 2 * d + 1


def _bridge_columns(d: int, gap: int) -> list[int]:
    start = 2 if gap % 2 == 0 else 0
    return list(range(start, row_width(d), 4))


def heavy_hex(d: int) -> CouplingGraph:
    if not isinstance(d, int) or d < 3 or d % 2 == 0:
        raise TopologyError(f"heavy-hex distance must be an odd integer >= 3, got {d!r}")
    w = row_width(d)
    labels: dict[int, tuple] = {}
    edges = []
    for r in range(d):
        for c in range(w):
            labels[r * w + c] = ("row", r, c)
            if c + 1 < w:
                edges.append((r * w + c, r * w + c + 1))
    node = d * w
    for gap in range(d - 1):
        for c in _bridge_columns(d, gap):
            labels[node] = ("bridge", gap, c)
            edges.append((gap * w + c, node))
            edges.append(((gap + 1) * w + c, node))
            node += 1
    return CouplingGraph.from_edges(node, edges, labels, d)


def _infer_distance(graph: CouplingGraph) -> int:
    if graph.distance is not None:
        return graph.distance
    for d in range(3, 99, 2):
        n = heavy_hex(d).num_nodes
        if n == graph.num_nodes:
            return d
        if n > graph.num_nodes:
            break
    raise TopologyError("unsupported topology: node count matches no heavy-hex distance")


# ---------------------------------------------------------------------------
# LNN reduction


@dataclass(frozen=True)
class LnnTopology:
    line: tuple[int, ...]
    dangling: dict[int, int]
    removed_edges: frozenset[tuple[int, int]]
    graph: CouplingGraph

    def __post_init__(self):
        object.__setattr__(self, "line", tuple(self.line))
        if len(set(self.line)) != len(self.line):
            raise TopologyError("line visits a node twice")
        for a, b in zip(self.line, self.line[1:]):
            if not self.graph.has_edge(a, b):
                raise TopologyError(f"line nodes {a} and {b} are not adjacent")
        on_line = set(self.line)
        for anchor, leaf in self.dangling.items():
            if anchor not in on_line:
                raise TopologyError(f"dangling anchor {anchor} is not on the line")
            if self.graph.neighbors(leaf) != [anchor]:
                raise TopologyError(f"dangling node {leaf} must have exactly the anchor {anchor} as neighbour")

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @cached_property
    def position(self) -> dict[int, int]:
        """Line index of every backbone node."""
        return {node: i for i, node in enumerate(self.line)}

    @cached_property
    def dangling_nodes(self) -> tuple[int, ...]:
        """Dangling nodes sorted by the line position of their anchors."""
        return tuple(self.dangling[a] for a in sorted(self.dangling, key=self.position.__getitem__))

    def anchor_of(self, leaf: int) -> int:
        for anchor, node in self.dangling.items():
            if node == leaf:
                return anchor
        raise KeyError(leaf)

    def signature(self) -> tuple:
        """Shape independent of node ids: line length and dangling anchor positions."""
        return (len(self.line), tuple(sorted(self.position[a] for a in self.dangling)))

    def to_json(self) -> dict:
        out = self.graph.to_json()
        out["line"] = list(self.line)
        out["dangling"] = {str(a): leaf for a, leaf in sorted(self.dangling.items())}
        out["removed_edges"] = [list(e) for e in sorted(self.removed_edges)]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "LnnTopology":
        graph = CouplingGraph.from_edges(data["num_nodes"], [tuple(e) for e in data["edges"]])
        return cls(
            tuple(data["line"]),
            {int(a): int(leaf) for a, leaf in data.get("dangling", {}).items()},
            frozenset(_edge(*e) for e in data.get("removed_edges", [])),
            graph,
        )


def path_topology(n: int) -> LnnTopology:
    """A bare ``n``-node line with no dangling nodes."""
    graph = CouplingGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    return LnnTopology(tuple(range(n)), {}, frozenset(), graph)


def to_lnn(graph: CouplingGraph) -> LnnTopology:
    """Serpentine line through every row qubit of a heavy-hex graph.

    Row 0 runs left to right, then the bridge at the right end of gap 0 leads
    into row 1 which runs right to left, and so on. Every other bridge keeps
    only its edge to the row above and becomes dangling. Accepts either the
    full lattice or an already-reduced one (the result is then identical).
    """
    d = _infer_distance(graph)
    full = heavy_hex(d)
    if not graph.edges <= full.edges:
        raise TopologyError("unsupported topology: not a heavy-hex graph or a reduction of one")
    w = row_width(d)
    bridge_id = {}
    for node, label in full.labels.items():
        if label[0] == "bridge":
            bridge_id[(label[1], label[2])] = node

    line: list[int] = []
    connectors = set()
    for r in range(d):
        cols = range(w) if r % 2 == 0 else range(w - 1, -1, -1)
        line.extend(r * w + c for c in cols)
        if r < d - 1:
            end_col = w - 1 if r % 2 == 0 else 0
            b = bridge_id[(r, end_col)]
            connectors.add(b)
            line.append(b)

    keep = set()
    for a, b in zip(line, line[1:]):
        keep.add(_edge(a, b))
    dangling: dict[int, int] = {}
    for (gap, c), b in sorted(bridge_id.items()):
        if b in connectors:
            continue
        anchor = gap * w + c
        dangling[anchor] = b
        keep.add(_edge(anchor, b))
    missing = keep - graph.edges
    if missing:
        raise TopologyError(f"unsupported topology: reduction needs edges {sorted(missing)[:3]}")
    derived = CouplingGraph(full.num_nodes, frozenset(keep), full.labels, d)
    return LnnTopology(tuple(line), dangling, frozenset(full.edges - keep), derived)


# ---------------------------------------------------------------------------
# two-chip systems


class LinkKind(enum.Enum):
    DANGLING = "DanglingLink"
    RANDOM = "RandomLink"

    @classmethod
    def parse(cls, value: "str | LinkKind") -> "LinkKind":
        if isinstance(value, cls):
            return value
        for member in cls:
            if value.lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ValueError(f"unknown link kind {value!r}")


@dataclass(frozen=True)
class MultiChipTopology:
    chips: tuple[LnnTopology, ...]
    link: tuple[int, int]
    link_kind: LinkKind

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for chip in self.chips:
            out.append(acc)
            acc += chip.num_nodes
        return tuple(out)

    @property
    def num_nodes(self) -> int:
        return sum(c.num_nodes for c in self.chips)

    def global_id(self, chip: int, node: int) -> int:
        return self.offsets[chip] + node

    def chip_of(self, node: int) -> int:
        for i in reversed(range(len(self.chips))):
            if node >= self.offsets[i]:
                return i
        raise KeyError(node)

    def local_id(self, node: int) -> int:
        return node - self.offsets[self.chip_of(node)]

    @cached_property
    def global_link(self) -> tuple[int, int]:
        return (self.global_id(0, self.link[0]), self.global_id(1, self.link[1]))

    @cached_property
    def graph(self) -> CouplingGraph:
        """Both derived chip graphs plus the link edge, in global ids."""
        edges = set()
        for i, chip in enumerate(self.chips):
            off = self.offsets[i]
            edges.update((u + off, v + off) for u, v in chip.graph.edges)
        edges.add(_edge(*self.global_link))
        return CouplingGraph(self.num_nodes, frozenset(edges))

    def to_json(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "edges": [list(e) for e in sorted(self.graph.edges)],
            "chips": [c.to_json() for c in self.chips],
            "link": list(self.global_link),
            "link_kind": self.link_kind.value,
        }


def link_chips(a: LnnTopology, b: LnnTopology, kind: LinkKind | str, seed: int = 0) -> MultiChipTopology:
    kind = LinkKind.parse(kind)
    if a.signature() != b.signature():
        raise TopologyError("chips must share the same LNN structure")
    if kind is LinkKind.DANGLING:
        if not a.dangling or not b.dangling:
            raise TopologyError("DanglingLink needs a dangling node on both chips")
        link = (min(a.dangling.values()), min(b.dangling.values()))
    else:
        rng = random.Random(seed)
        link = (rng.choice(a.line), rng.choice(b.line))
    return MultiChipTopology((a, b), link, kind)


def two_chip_system(d: int, kind: LinkKind | str, seed: int = 0) -> MultiChipTopology:
    """Two copies of the LNN reduction of ``heavy_hex(d)`` joined by one link."""
    chip = to_lnn(heavy_hex(d))
    return link_chips(chip, chip, kind, seed)


# ---------------------------------------------------------------------------
# text rendering


def render(topo: LnnTopology) -> str:
    """ASCII picture of a heavy-hex derived topology (rows, bridges, dangling)."""
    labels = topo.graph.labels
    d = topo.graph.distance
    if not labels or d is None:
        return " - ".join(str(n) for n in topo.line)
    w = row_width(d)
    cell = max(len(str(topo.num_nodes - 1)), 2) + 1
    out = []
    bridges = {
        (lab[1], lab[2]): node
        for node, lab in labels.items()
        if lab[0] == "bridge"
    }
    for r in range(d):
        row = []
        for c in range(w):
            row.append(str(r * w + c).rjust(cell))
            if c + 1 < w:
                row.append("-")
        out.append("".join(row))
        if r == d - 1:
            continue
        upper, node_line, lower = [" "] * (w * (cell + 1)), [" "] * (w * (cell + 1)), [" "] * (w * (cell + 1))
        for c in range(w):
            b = bridges.get((r, c))
            if b is None:
                continue
            col = c * (cell + 1) + cell - 1
            upper[col] = "|"
            tag = str(b) + ("*" if b in topo.dangling.values() else "")
            for i, ch in enumerate(tag):
                if col + i < len(node_line):
                    node_line[col + i] = ch
            lower[col] = "|" if topo.graph.has_edge(b, (r + 1) * w + c) else " "
        out.extend("".join(x).rstrip() for x in (upper, node_line, lower))
    out.append("(* dangling)")
    return "\n".join(out)


def save_topology(path, topo: LnnTopology | MultiChipTopology) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(topo.to_json(), fh, indent=2)
