"""Lookahead SWAP-insertion router with decay, for arbitrary coupling graphs."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from ..circuit import Accounting, Circuit, Gate, depth, gate_count, swap
from ..topology import CouplingGraph
from .common import CompiledCircuit, Layout, RoutingError, Strategy


@dataclass(frozen=True)
class RouterConfig:
    lookahead_size: int = 20
    decay_delta: float = 0.001
    decay_reset: int = 5
    extended_weight: float = 0.5
    seed: int = 0
    trials: int = 3

    def __post_init__(self):
        if self.lookahead_size < 0 or self.decay_reset < 1:
            raise ValueError("lookahead_size must be >= 0 and decay_reset >= 1")
        if self.decay_delta < 0 or self.extended_weight < 0:
            raise ValueError("weights must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def to_json(self) -> dict:
        return asdict(self)


class _Dag:
    """Program-order dependencies through shared qubits and classical bits."""

    def __init__(self, circuit: Circuit):
        self.gates = circuit.gates
        n = len(self.gates)
        self.succ: list[list[int]] = [[] for _ in range(n)]
        self.indegree = [0] * n
        last_q: dict[int, int] = {}
        last_c: dict[int, int] = {}
        for i, g in enumerate(self.gates):
            preds = {last_q[q] for q in g.qubits if q in last_q}
            if g.cbit is not None and g.cbit in last_c:
                preds.add(last_c[g.cbit])
            for p in preds:
                self.succ[p].append(i)
            self.indegree[i] = len(preds)
            for q in g.qubits:
                last_q[q] = i
            if g.cbit is not None:
                last_c[g.cbit] = i


def _reverse(circuit: Circuit) -> Circuit:
    return circuit.with_gates(reversed(circuit.gates))


def _initial_layout(n: int, graph: CouplingGraph, rng: random.Random) -> Layout:
    return Layout(rng.sample(range(graph.num_nodes), n))


def _route_once(
    circuit: Circuit,
    graph: CouplingGraph,
    dist: list[list[int]],
    layout: Layout,
    cfg: RouterConfig,
    rng: random.Random,
) -> tuple[list[Gate], Layout, int]:
    dag = _Dag(circuit)
    gates = dag.gates
    indeg = list(dag.indegree)
    front = [i for i, k in enumerate(indeg) if k == 0]
    layout = layout.copy()
    decay = [1.0] * graph.num_nodes
    out: list[Gate] = []
    swaps = 0
    since_reset = 0
    since_progress = 0
    valve = 10 * max(1, max(max(row) for row in dist))

    def executable(i: int) -> bool:
        g = gates[i]
        return not g.is_two_qubit or graph.has_edge(layout[g.qubits[0]], layout[g.qubits[1]])

    def extended_set() -> list[int]:
        ext: list[int] = []
        seen = set(front)
        queue = list(front)
        indeg_copy: dict[int, int] = {}
        head = 0
        while head < len(queue) and len(ext) < cfg.lookahead_size:
            i = queue[head]
            head += 1
            for s in dag.succ[i]:
                left = indeg_copy.get(s, indeg[s]) - 1
                indeg_copy[s] = left
                if left == 0 and s not in seen:
                    seen.add(s)
                    queue.append(s)
                    if gates[s].is_two_qubit:
                        ext.append(s)
                        if len(ext) >= cfg.lookahead_size:
                            break
        return ext

    def pair_cost(idx: list[int]) -> float:
        total = 0
        for i in idx:
            a, b = gates[i].qubits
            total += dist[layout[a]][layout[b]]
        return total / len(idx) if idx else 0.0

    while front:
        ready = [i for i in front if executable(i)]
        if ready:
            for i in ready:
                out.append(gates[i].remap(layout.log2phys))
                front.remove(i)
                for s in dag.succ[i]:
                    indeg[s] -= 1
                    if indeg[s] == 0:
                        front.append(s)
            front.sort()
            decay = [1.0] * graph.num_nodes
            since_reset = 0
            since_progress = 0
            continue

        front_2q = [i for i in front if gates[i].is_two_qubit]
        if since_progress > valve:
            # release valve: walk the closest front pair together along a shortest path
            i = min(front_2q, key=lambda k: (dist[layout[gates[k].qubits[0]]][layout[gates[k].qubits[1]]], k))
            a, b = gates[i].qubits
            path = _shortest_path(graph, dist, layout[a], layout[b])
            for u, v in zip(path, path[1:-1]):
                out.append(swap(u, v))
                layout.swap(u, v)
                swaps += 1
            since_progress = 0
            continue

        ext = extended_set()
        candidates = set()
        for i in front_2q:
            for q in gates[i].qubits:
                p = layout[q]
                for nb in graph.neighbors(p):
                    candidates.add((min(p, nb), max(p, nb)))
        best_score = None
        best: list[tuple[int, int]] = []
        for u, v in sorted(candidates):
            layout.swap(u, v)
            h = pair_cost(front_2q) + cfg.extended_weight * pair_cost(ext)
            layout.swap(u, v)
            h *= max(decay[u], decay[v])
            if best_score is None or h < best_score - 1e-12:
                best_score, best = h, [(u, v)]
            elif abs(h - best_score) <= 1e-12:
                best.append((u, v))
        u, v = rng.choice(best)
        out.append(swap(u, v))
        layout.swap(u, v)
        swaps += 1
        since_progress += 1
        decay[u] += cfg.decay_delta
        decay[v] += cfg.decay_delta
        since_reset += 1
        if since_reset >= cfg.decay_reset:
            decay = [1.0] * graph.num_nodes
            since_reset = 0
    return out, layout, swaps


def _shortest_path(graph: CouplingGraph, dist: list[list[int]], src: int, dst: int) -> list[int]:
    path = [src]
    while path[-1] != dst:
        here = path[-1]
        path.append(min(nb for nb in graph.neighbors(here) if dist[nb][dst] == dist[here][dst] - 1))
    return path


def route_sabre(circuit: Circuit, graph: CouplingGraph, cfg: RouterConfig | None = None) -> CompiledCircuit:
    """Route ``circuit`` onto ``graph``, keeping the best of ``cfg.trials`` attempts.

    Each attempt starts from a seeded random layout, refines it with one
    forward and one backward pass, then routes forward for real. Attempts are
    ranked by (gate count, depth).
    """
    cfg = RouterConfig() if cfg is None else cfg
    if circuit.num_qubits > graph.num_nodes:
        raise RoutingError(f"circuit needs {circuit.num_qubits} qubits, graph has {graph.num_nodes}")
    if not graph.is_connected():
        raise RoutingError("coupling graph is disconnected")
    dist = graph.distance_matrix()
    master = random.Random(cfg.seed)
    best = None
    for _ in range(cfg.trials):
        rng = random.Random(master.getrandbits(64))
        layout = _initial_layout(circuit.num_qubits, graph, rng)
        _, layout, _ = _route_once(circuit, graph, dist, layout, cfg, rng)
        _, layout, _ = _route_once(_reverse(circuit), graph, dist, layout, cfg, rng)
        initial = layout.copy()
        gates, final, swaps = _route_once(circuit, graph, dist, initial, cfg, rng)
        routed = Circuit(graph.num_nodes, circuit.num_cbits, tuple(gates), circuit.name)
        key = (gate_count(routed, Accounting.SWAP_AS_ONE), depth(routed))
        if best is None or key < best[0]:
            best = (key, CompiledCircuit(routed, initial, final, swaps, Strategy.SABRE))
    return best[1]
