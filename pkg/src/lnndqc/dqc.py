"""Two-chip distribution: partition, route, and lower non-local gates to teleports.

Each chip contributes its LNN backbone as data nodes. The link endpoints are
communication qubits and never hold data; the data nodes next to them are
the ports. A dangling endpoint leaves the backbone whole. A backbone endpoint
cuts the backbone into two segments, and data can only pass between those
segments through the other chip.

A SWAP between ports on opposite chips is a cross-group SWAP. It is lowered
to a state teleport when one side holds no data (1 e-bit) and to three
gate-teleported CX gates otherwise (3 e-bits).
"""

from __future__ import annotations

import enum
import heapq
import json
from dataclasses import dataclass, field

from .circuit import (
    CONTROLLED_KINDS,
    Circuit,
    Gate,
    GateKind,
    corr_x,
    corr_z,
    cx,
    epr,
    h,
    measure,
    swap,
)
from .routing.common import Layout
from .topology import MultiChipTopology

LOOKAHEAD = 20
DECAY = 0.8
CROSS_WEIGHT = 3


class DistributionError(ValueError):
    pass


class TeleportMode(enum.Enum):
    STATE = "StateTeleport"
    GATE = "GateTeleport"
    GATE_BATCHED = "GateTeleportBatched"
    AUTO = "Auto"

    @classmethod
    def parse(cls, value: "str | TeleportMode") -> "TeleportMode":
        if isinstance(value, cls):
            return value
        for member in cls:
            if value.lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ValueError(f"unknown teleport mode {value!r}")


@dataclass(frozen=True)
class PartitionAssignment:
    qubit_chip: dict[int, int]
    cut_gates: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "qubit_chip": {str(q): c for q, c in sorted(self.qubit_chip.items())},
            "cut_gates": list(self.cut_gates),
        }


@dataclass
class DistributedCircuit:
    circuit: Circuit
    topo: MultiChipTopology
    partition: PartitionAssignment
    mode: TeleportMode
    initial_layout: Layout
    final_layout: Layout
    nonlocal_sites: list[tuple[int, str]] = field(default_factory=list)
    ebits_consumed: int = 0
    cross_group_swaps: int = 0
    swap_count: int = 0

    def sidecar(self) -> dict:
        return {
            "mode": self.mode.value,
            "link_kind": self.topo.link_kind.value,
            "link": list(self.topo.global_link),
            "qubit_chip": self.partition.to_json()["qubit_chip"],
            "cut_gates": list(self.partition.cut_gates),
            "initial_layout": self.initial_layout.as_list(),
            "final_layout": self.final_layout.as_list(),
            "nonlocal_sites": [[i, m] for i, m in self.nonlocal_sites],
            "ebits_consumed": self.ebits_consumed,
            "cross_group_swaps": self.cross_group_swaps,
            "swap_count": self.swap_count,
        }

    def write_sidecar(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.sidecar(), fh, indent=2)


# ---------------------------------------------------------------------------
# lowering


def lower_state_teleport(sender: int, sender_half: int, receiver: int, cbits: tuple[int, int]) -> list[Gate]:
    """Move the state of ``sender`` onto ``receiver`` through the link pair.

    ``sender_half`` and ``receiver`` are the link endpoints. Consumes one
    e-bit; ``sender`` and ``sender_half`` end in measured basis states.
    """
    k1, k2 = cbits
    return [
        epr(sender_half, receiver),
        cx(sender, sender_half),
        h(sender),
        measure(sender, k1),
        measure(sender_half, k2),
        corr_x(receiver, k2),
        corr_z(receiver, k1),
    ]


def _entangle(control: int, near: int, far: int, cbit: int) -> list[Gate]:
    return [epr(near, far), cx(control, near), measure(near, cbit), corr_x(far, cbit)]


def _disentangle(control: int, far: int, cbit: int) -> list[Gate]:
    return [h(far), measure(far, cbit), corr_z(control, cbit)]


def _remote(kind: GateKind, far: int, target: int, param: float | None) -> Gate:
    if kind not in CONTROLLED_KINDS:
        raise DistributionError(f"unsupported lowering: {kind.value} is not a controlled gate")
    return Gate(kind, (far, target), param)


def lower_gate_teleport(
    control: int,
    near: int,
    far: int,
    ops: list[tuple[GateKind, float | None, int]],
    cbits: tuple[int, int],
) -> list[Gate]:
    """Apply controlled gates from ``control`` to targets next to ``far``.

    ``near`` and ``far`` are the link endpoints, ``near`` beside the control.
    Every entry of ``ops`` is ``(kind, angle, target)``; all of them share the
    one e-bit, so a single entry is plain gate teleportation and several are a
    batched run. Data qubits stay where they are.
    """
    k0, k1 = cbits
    body = [_remote(kind, far, t, param) for kind, param, t in ops]
    return _entangle(control, near, far, k0) + body + _disentangle(control, far, k1)


# ---------------------------------------------------------------------------
# data graph


@dataclass(frozen=True)
class _Chip:
    comm: int
    ports: tuple[int, ...]
    rays: tuple[tuple[int, ...], ...]  # data nodes fanning out from the ports


class _DataGraph:
    """Data nodes of both chips, intra-chip edges, and port-to-port virtual edges."""

    def __init__(self, topo: MultiChipTopology):
        self.topo = topo
        self.adj: dict[int, list[tuple[int, int]]] = {}
        self.chips: list[_Chip] = []
        self.chip_of: dict[int, int] = {}
        for c, chip in enumerate(topo.chips):
            comm_local = topo.link[c]
            g = lambda v, c=c: topo.global_id(c, v)  # noqa: E731
            line = [v for v in chip.line]
            if comm_local in chip.position:
                r = chip.position[comm_local]
                left, right = line[:r][::-1], line[r + 1 :]
                ports = tuple(g(seg[0]) for seg in (left, right) if seg)
                rays = [seg for seg in (left, right) if seg]
                data = left + right
            else:
                pp = chip.position[chip.anchor_of(comm_local)]
                ports = (g(line[pp]),)
                rays = [line[pp:], line[pp::-1]]
                data = line
            rays.sort(key=len, reverse=True)
            seen, ordered = set(), []
            for ray in rays:
                ordered.append(tuple(g(v) for v in ray if g(v) not in seen))
                seen.update(g(v) for v in ray)
            self.chips.append(_Chip(topo.global_id(c, comm_local), ports, tuple(ordered)))
            for v in data:
                self.adj[g(v)] = []
                self.chip_of[g(v)] = c
            for a, b in zip(line, line[1:]):
                if comm_local not in (a, b):
                    self.adj[g(a)].append((g(b), 1))
                    self.adj[g(b)].append((g(a), 1))
        self.virtual = set()
        for u in self.chips[0].ports:
            for v in self.chips[1].ports:
                self.adj[u].append((v, CROSS_WEIGHT))
                self.adj[v].append((u, CROSS_WEIGHT))
                self.virtual.add((u, v))
                self.virtual.add((v, u))
        self.dist = {s: self._dijkstra(s, None)[0] for s in self.adj}

    def capacity(self, chip: int) -> int:
        return sum(len(r) for r in self.chips[chip].rays)

    def is_virtual(self, u: int, v: int) -> bool:
        return (u, v) in self.virtual

    def intra_neighbours(self, v: int) -> list[int]:
        return [w for w, wt in self.adj[v] if wt == 1]

    def _dijkstra(self, src: int, blocked: int | None, intra_only: bool = False):
        dist = {src: 0}
        prev: dict[int, int] = {}
        heap = [(0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w in self.adj[u]:
                if v == blocked or (intra_only and w != 1):
                    continue
                nd = d + w
                if nd < dist.get(v, nd + 1):
                    dist[v] = nd
                    prev[v] = u
                    heapq.heappush(heap, (nd, v))
        return dist, prev

    def path(self, src: int, targets, blocked: int | None = None, intra_only: bool = False):
        """Cheapest path from ``src`` to the nearest of ``targets``; None if unreachable."""
        dist, prev = self._dijkstra(src, blocked, intra_only)
        reach = [(dist[t], t) for t in targets if t in dist]
        if not reach:
            return None
        _, t = min(reach)
        out = [t]
        while out[-1] != src:
            out.append(prev[out[-1]])
        return out[::-1]

    def cost(self, path: list[int]) -> int:
        return sum(CROSS_WEIGHT if self.is_virtual(u, v) else 1 for u, v in zip(path, path[1:]))


# ---------------------------------------------------------------------------
# partition


def partition(circuit: Circuit, topo: MultiChipTopology) -> PartitionAssignment:
    """Contiguous half split: qubits below ``ceil(n/2)`` on chip 0."""
    n = circuit.num_qubits
    half = (n + 1) // 2
    data = _DataGraph(topo)
    if data.capacity(0) < half or data.capacity(1) < n - half:
        raise DistributionError(
            f"{n} qubits do not fit: chips hold {data.capacity(0)} and {data.capacity(1)} data qubits"
        )
    chip = {q: 0 if q < half else 1 for q in range(n)}
    cut = tuple(
        i
        for i, g in enumerate(circuit.gates)
        if g.is_two_qubit and chip[g.qubits[0]] != chip[g.qubits[1]]
    )
    return PartitionAssignment(chip, cut)


def _place(part: PartitionAssignment, data: _DataGraph) -> Layout:
    """Fill each chip outward from its ports, longest ray first.

    Chip 0 puts its highest qubits nearest the port. Chip 1 leaves as many
    nodes free next to its port as chip 0 has qubits (space permitting), so
    qubits arriving over the link move in one way instead of exchanging
    places with a resident.
    """
    out = {}
    for c in (0, 1):
        qubits = sorted((q for q, k in part.qubit_chip.items() if k == c), reverse=(c == 0))
        nodes = [v for ray in data.chips[c].rays for v in ray]
        gap = 0 if c == 0 else min(len(part.qubit_chip) - len(qubits), len(nodes) - len(qubits))
        out.update(zip(qubits, nodes[gap:]))
    return Layout(out)


# ---------------------------------------------------------------------------
# distribution


class _Distributor:
    def __init__(self, circuit: Circuit, topo: MultiChipTopology, mode: TeleportMode):
        self.circuit = circuit
        self.topo = topo
        self.mode = mode
        self.data = _DataGraph(topo)
        self.part = partition(circuit, topo)
        self.layout = _place(self.part, self.data)
        self.initial = self.layout.copy()
        self.out: list[Gate] = []
        self.sites: list[tuple[int, str]] = []
        self.next_cbit = circuit.num_cbits
        self.cross = 0
        self.cat: tuple[int, int] | None = None  # (control qubit, cbit reserved for closing)
        self.cat_far = 0
        self.gates = circuit.gates
        self.two_qubit_after: list[list[int]] = self._next_two_qubit()

    def _next_two_qubit(self) -> list[list[int]]:
        """For every gate, the index of the next two-qubit gate on each operand (or -1)."""
        nxt: dict[int, int] = {}
        out: list[list[int]] = [[] for _ in self.gates]
        for i in range(len(self.gates) - 1, -1, -1):
            g = self.gates[i]
            out[i] = [nxt.get(q, -1) for q in g.qubits]
            if g.is_two_qubit:
                for q in g.qubits:
                    nxt[q] = i
        return out

    def cbit(self) -> int:
        self.next_cbit += 1
        return self.next_cbit - 1

    def chip(self, q: int) -> int:
        return self.data.chip_of[self.layout[q]]

    # -- moves -------------------------------------------------------------

    def walk(self, path: list[int], idx: int) -> None:
        for u, v in zip(path, path[1:]):
            if self.data.is_virtual(u, v):
                self.cross_swap(u, v, idx)
            else:
                self.out.append(swap(u, v))
                self.layout.swap(u, v)

    def cross_swap(self, u: int, v: int, idx: int) -> None:
        self.close_cat()
        cu = self.data.chips[self.data.chip_of[u]].comm
        cv = self.data.chips[self.data.chip_of[v]].comm
        qu, qv = self.layout.logical_at(u), self.layout.logical_at(v)
        if qu is None and qv is None:
            return
        self.cross += 1
        if qu is None or qv is None:
            src, half, dst, recv = (u, cu, v, cv) if qv is None else (v, cv, u, cu)
            self.out += lower_state_teleport(src, half, recv, (self.cbit(), self.cbit()))
            self.out.append(swap(recv, dst))
            self.sites.append((idx, TeleportMode.STATE.value))
        else:
            for c, near, far, t in ((u, cu, cv, v), (v, cv, cu, u), (u, cu, cv, v)):
                self.out += lower_gate_teleport(c, near, far, [(GateKind.CX, None, t)], (self.cbit(), self.cbit()))
            self.sites.append((idx, TeleportMode.GATE.value))
        self.layout.swap(u, v)

    def to_port(self, q: int, idx: int, port: int | None = None) -> int:
        """Walk ``q`` along its chip to ``port`` (or the nearest port); returns the port."""
        here = self.layout[q]
        ports = [port] if port is not None else list(self.data.chips[self.data.chip_of[here]].ports)
        path = self.data.path(here, ports, intra_only=True)
        if path is None:
            raise DistributionError(f"qubit {q} cannot reach a port of its chip")
        self.walk(path, idx)
        return path[-1]

    # -- gate teleportation ------------------------------------------------

    def close_cat(self) -> None:
        if self.cat is None:
            return
        control, k = self.cat
        self.out += _disentangle(self.layout[control], self.cat_far, k)
        self.cat = None

    def choose_control(self, idx: int) -> int:
        g = self.gates[idx]
        if g.kind is GateKind.CX:
            return g.qubits[0]
        best = None
        for q, j in zip(g.qubits, self.two_qubit_after[idx]):
            if j < 0:
                continue
            nxt = self.gates[j]
            other = nxt.qubits[1] if nxt.qubits[0] == q else nxt.qubits[0]
            joins = nxt.kind in CONTROLLED_KINDS and (nxt.kind is not GateKind.CX or nxt.qubits[0] == q)
            if joins and self.chip(other) != self.chip(q) and (best is None or j < best[0]):
                best = (j, q)
        return g.qubits[0] if best is None else best[1]

    def joins_cat(self, g: Gate) -> bool:
        if self.cat is None or self.mode is TeleportMode.GATE or g.kind not in CONTROLLED_KINDS:
            return False
        control = self.cat[0]
        if control not in g.qubits or (g.kind is GateKind.CX and g.qubits[0] != control):
            return False
        target = g.qubits[1] if g.qubits[0] == control else g.qubits[0]
        return self.chip(target) != self.chip(control)

    def gate_teleport(self, idx: int) -> None:
        g = self.gates[idx]
        if self.joins_cat(g):
            control = self.cat[0]
            target = g.qubits[1] if g.qubits[0] == control else g.qubits[0]
            self.to_port(target, idx)
            self.out.append(_remote(g.kind, self.cat_far, self.layout[target], g.param))
            self.sites.append((idx, TeleportMode.GATE_BATCHED.value))
            return
        self.close_cat()
        control = self.choose_control(idx)
        target = g.qubits[1] if g.qubits[0] == control else g.qubits[0]
        cc, tc = self.chip(control), self.chip(target)
        pairs = [
            (self.data.dist[self.layout[control]][p] + self.data.dist[self.layout[target]][r], p, r)
            for p in self.data.chips[cc].ports
            for r in self.data.chips[tc].ports
        ]
        _, pc, pt = min(pairs)
        self.to_port(control, idx, pc)
        self.to_port(target, idx, pt)
        near, far = self.data.chips[cc].comm, self.data.chips[tc].comm
        self.out += _entangle(self.layout[control], near, far, self.cbit())
        self.out.append(_remote(g.kind, far, self.layout[target], g.param))
        self.cat, self.cat_far = (control, self.cbit()), far
        batched = self.mode in (TeleportMode.GATE_BATCHED, TeleportMode.AUTO)
        self.sites.append((idx, (TeleportMode.GATE_BATCHED if batched else TeleportMode.GATE).value))
        if not batched:
            self.close_cat()

    # -- transport ---------------------------------------------------------

    def lookahead(self, idx: int, moved: dict[int, int]) -> float:
        cost, weight, seen = 0.0, 1.0, 0
        for g in self.gates[idx + 1 :]:
            if seen >= LOOKAHEAD:
                break
            if not g.is_two_qubit:
                continue
            u, v = (moved.get(q, self.layout[q]) for q in g.qubits)
            cost += weight * self.data.dist[u][v]
            weight *= DECAY
            seen += 1
        return cost

    def moved_by(self, path: list[int]) -> dict[int, int]:
        out = {}
        mover = self.layout.logical_at(path[0])
        out[mover] = path[-1]
        for a, b in zip(path, path[1:]):
            q = self.layout.logical_at(b)
            if q is not None:
                out[q] = a
        return out

    def transport(self, idx: int) -> None:
        """Bring the operands of gate ``idx`` onto neighbouring nodes of one chip."""
        a, b = self.gates[idx].qubits
        for _ in range(4):
            pa, pb = self.layout[a], self.layout[b]
            if pb in self.data.intra_neighbours(pa):
                return
            options = []
            for rank, (mover, other) in enumerate(((a, b), (b, a))):
                src, dst = self.layout[mover], self.layout[other]
                path = self.data.path(src, self.data.intra_neighbours(dst), blocked=dst)
                if path is not None:
                    options.append((self.data.cost(path), self.lookahead(idx, self.moved_by(path)), rank, path))
            if options:
                path = min(options)[3]
                if self.cat is not None and self.layout[self.cat[0]] in path:
                    self.close_cat()
                self.walk(path, idx)
                return
            # every route runs through the partner: move one operand somewhere
            # with room on its chip, then try again
            for q, other in ((b, a), (a, b)):
                roomy = [v for v in self.data.adj if v != self.layout[q] and self.data.intra_neighbours(v)]
                path = self.data.path(self.layout[q], roomy, blocked=self.layout[other])
                if path is not None:
                    if self.cat is not None and self.layout[self.cat[0]] in path:
                        self.close_cat()
                    self.walk(path, idx)
                    break
            else:
                break
        raise DistributionError(f"operands of gate {idx} cannot be brought together")

    # -- driver ------------------------------------------------------------

    def uses_gate_teleport(self, idx: int) -> bool:
        g = self.gates[idx]
        a, b = g.qubits
        if self.chip(a) == self.chip(b) or self.mode is TeleportMode.STATE:
            return False
        if g.kind in CONTROLLED_KINDS:
            return True
        if self.mode is TeleportMode.AUTO:
            return False
        raise DistributionError(
            f"unsupported lowering: gate {idx} ({g.kind.value}) crosses chips but is not a controlled gate"
        )

    def run(self) -> DistributedCircuit:
        for idx, g in enumerate(self.gates):
            if self.cat is not None and self.cat[0] in g.qubits and not self.joins_cat(g):
                self.close_cat()
            if not g.is_two_qubit:
                self.out.append(g.remap(self.layout.log2phys))
                continue
            if self.uses_gate_teleport(idx):
                self.gate_teleport(idx)
                continue
            self.transport(idx)
            self.out.append(g.remap(self.layout.log2phys))
        self.close_cat()
        routed = Circuit(self.topo.num_nodes, self.next_cbit, tuple(self.out), self.circuit.name)
        ebits = sum(1 for g in self.out if g.kind is GateKind.EPR_PREP)
        swaps = sum(1 for g in self.out if g.kind is GateKind.SWAP)
        return DistributedCircuit(
            routed,
            self.topo,
            self.part,
            self.mode,
            self.initial,
            self.layout,
            self.sites,
            ebits,
            self.cross,
            swaps,
        )


def distribute(
    circuit: Circuit,
    topo: MultiChipTopology,
    mode: TeleportMode | str = TeleportMode.AUTO,
) -> DistributedCircuit:
    """Compile ``circuit`` onto a two-chip system.

    ``Auto`` gate-teleports controlled cut gates (batching runs that share a
    control) and moves qubits across the link for everything else.
    ``StateTeleport`` always moves qubits; the gate-teleport modes refuse cut
    gates that are not controlled. The link kind and its seed live in ``topo``.
    """
    mode = TeleportMode.parse(mode)
    if len(topo.chips) != 2:
        raise DistributionError("distribution needs exactly two chips")
    return _Distributor(circuit, topo, mode).run()


__all__ = [
    "DistributedCircuit",
    "DistributionError",
    "PartitionAssignment",
    "TeleportMode",
    "distribute",
    "lower_gate_teleport",
    "lower_state_teleport",
    "partition",
]
