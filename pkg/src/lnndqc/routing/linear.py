"""Nearest-neighbour routing on the backbone of an LNN topology."""

from __future__ import annotations

from collections import defaultdict

from ..circuit import DIAGONAL_KINDS, Circuit, Gate, depth, swap
from ..topology import LnnTopology
from .common import CompiledCircuit, Layout, RoutingError, Strategy

LOOKAHEAD = 20
DECAY = 0.8
NEAR_COMPLETE = 0.9


def place(circuit: Circuit, topo: LnnTopology) -> Layout:
    """Logical qubit ``i`` on the ``i``-th backbone node; dangling nodes stay free."""
    if circuit.num_qubits > len(topo.line):
        raise RoutingError(
            f"circuit needs {circuit.num_qubits} qubits, backbone has {len(topo.line)}"
        )
    return Layout({i: topo.line[i] for i in range(circuit.num_qubits)})


def _emit(gate: Gate, layout: Layout) -> Gate:
    return gate.remap(layout.log2phys)


def _shifted(p: int, mover: int, target: int) -> int:
    """Line position of whatever sat at ``p`` after ``mover`` walks next to ``target``."""
    if mover < target:
        end = target - 1
        if p == mover:
            return end
        return p - 1 if mover < p <= end else p
    end = target + 1
    if p == mover:
        return end
    return p + 1 if end <= p < mover else p


def _lookahead_cost(window, layout: Layout, pos, mover: int, target: int) -> float:
    cost, weight = 0.0, 1.0
    for g in window:
        u, v = g.qubits
        cost += weight * abs(_shifted(pos[layout[u]], mover, target) - _shifted(pos[layout[v]], mover, target))
        weight *= DECAY
    return cost


def route_greedy(
    circuit: Circuit,
    topo: LnnTopology,
    layout: Layout | None = None,
    lookahead: int = LOOKAHEAD,
) -> CompiledCircuit:
    """Program-order routing with ``distance - 1`` SWAPs per distant pair.

    Either operand can walk to its partner. The walk that leaves the next
    ``lookahead`` two-qubit interactions closer together wins, where the k-th
    upcoming interaction's line distance is weighted by ``DECAY**k``. On a tie
    the operand at the lower line position moves right.
    """
    layout = place(circuit, topo) if layout is None else layout
    pos = topo.position
    for phys in layout.phys2log:
        if phys not in pos:
            raise RoutingError(f"layout uses node {phys}, which is not on the backbone")
    initial = layout.copy()
    layout = layout.copy()
    line = topo.line
    out: list[Gate] = []
    swaps = 0
    gates = circuit.gates
    for idx, g in enumerate(gates):
        if not g.is_two_qubit:
            out.append(_emit(g, layout))
            continue
        a, b = g.qubits
        pa, pb = pos[layout[a]], pos[layout[b]]
        if abs(pa - pb) > 1:
            window = [w for w in gates[idx + 1 : idx + 1 + lookahead] if w.is_two_qubit]
            cost_a = _lookahead_cost(window, layout, pos, pa, pb)
            cost_b = _lookahead_cost(window, layout, pos, pb, pa)
            if cost_a < cost_b:
                mover, target = a, pb
            elif cost_b < cost_a:
                mover, target = b, pa
            else:
                mover, target = (a, pb) if pa < pb else (b, pa)
            p = pos[layout[mover]]
            step = 1 if target > p else -1
            while abs(target - p) > 1:
                u, v = line[p], line[p + step]
                out.append(swap(u, v))
                layout.swap(u, v)
                swaps += 1
                p += step
        out.append(_emit(g, layout))
    compiled = Circuit(topo.num_nodes, circuit.num_cbits, tuple(out), circuit.name)
    return CompiledCircuit(compiled, initial, layout, swaps, Strategy.GREEDY)


def refine_placement(
    circuit: Circuit, topo: LnnTopology, rounds: int = 3, layout: Layout | None = None
) -> Layout:
    """Improve a placement by alternating forward and reverse greedy passes.

    Each round routes the circuit forward, then routes it backwards from where
    the forward pass ended; the layout the backward pass ends in is a
    placement that suits the start of the circuit. The candidate with the
    fewest SWAPs wins, the starting placement on ties.
    """
    start = place(circuit, topo) if layout is None else layout
    backwards = circuit.with_gates(reversed(circuit.gates))
    best, best_swaps = start, route_greedy(circuit, topo, start).swap_count
    current = start
    for _ in range(rounds):
        forward = route_greedy(circuit, topo, current)
        current = route_greedy(backwards, topo, forward.final_layout).final_layout
        swaps = route_greedy(circuit, topo, current).swap_count
        if swaps < best_swaps:
            best, best_swaps = current, swaps
    return best


def route_swap_network(
    circuit: Circuit, topo: LnnTopology, layout: Layout | None = None
) -> CompiledCircuit:
    """Odd-even transposition routing for all-pairs interaction patterns.

    The occupied stretch of the line is reversed repeatedly by alternating
    even and odd rounds of neighbour exchanges; within one reversal every two
    qubits become adjacent once. A gate is emitted as soon as its operands are
    adjacent and every earlier gate it does not commute with has been emitted;
    runs of diagonal gates (CP, CZ, RZZ, RZ, Z) on a qubit commute, so they may
    be emitted in meeting order rather than program order. During
    the k-th reversal a pair holds back its exchange until it has interacted
    min(k, its total interactions) times, unless the whole round would
    otherwise stall. Pairs of qubits with no two-qubit work left cross without
    a SWAP.
    """
    layout = place(circuit, topo) if layout is None else layout
    pos = topo.position
    try:
        occupied = sorted(pos[p] for p in layout.phys2log)
    except KeyError as exc:
        raise RoutingError(f"layout uses node {exc.args[0]}, which is not on the backbone") from None
    if occupied and occupied != list(range(occupied[0], occupied[0] + len(occupied))):
        return _fallback(circuit, topo, layout, "occupied line positions are not contiguous")

    initial = layout.copy()
    layout = layout.copy()
    line = topo.line
    gates = circuit.gates
    lo = occupied[0] if occupied else 0
    hi = occupied[-1] if occupied else -1

    # Per qubit, program order split into blocks: a run of diagonal gates is
    # one block (its members commute), every other gate is a block of its own.
    blocks: dict[int, list[set[int]]] = defaultdict(list)
    block_of: dict[tuple[int, int], int] = {}
    open_diag: dict[int, bool] = defaultdict(bool)
    pending_2q: dict[int, int] = defaultdict(int)
    pair_total: dict[tuple[int, int], int] = defaultdict(int)
    for i, g in enumerate(gates):
        diag = g.kind in DIAGONAL_KINDS
        for q in g.qubits:
            if not (diag and open_diag[q]):
                blocks[q].append(set())
            blocks[q][-1].add(i)
            block_of[(i, q)] = len(blocks[q]) - 1
            open_diag[q] = diag
            if g.is_two_qubit:
                pending_2q[q] += 1
        if g.is_two_qubit:
            pair_total[(min(g.qubits), max(g.qubits))] += 1
    pair_done: dict[tuple[int, int], int] = defaultdict(int)
    current: dict[int, int] = defaultdict(int)
    out: list[Gate] = []
    swaps = 0
    remaining = len(gates)

    def ready(i: int) -> bool:
        return all(block_of[(i, q)] == current[q] for q in gates[i].qubits)

    held: dict[int, list[Gate]] = defaultdict(list)

    def release(q: int) -> None:
        out.extend(_emit(h, layout) for h in held.pop(q, ()))

    def execute(i: int) -> None:
        nonlocal remaining
        g = gates[i]
        if g.is_two_qubit:
            for q in g.qubits:
                release(q)
            out.append(_emit(g, layout))
        else:
            # held back so a following SWAP does not have to wait for it
            held[g.qubits[0]].append(g)
        remaining -= 1
        for q in g.qubits:
            blocks[q][current[q]].discard(i)
            while current[q] < len(blocks[q]) and not blocks[q][current[q]]:
                current[q] += 1
            if g.is_two_qubit:
                pending_2q[q] -= 1
        if g.is_two_qubit:
            pair_done[(min(g.qubits), max(g.qubits))] += 1

    def front(q: int) -> set[int]:
        return blocks[q][current[q]] if current[q] < len(blocks[q]) else set()

    def flush(q: int) -> None:
        while True:
            single = [i for i in front(q) if not gates[i].is_two_qubit]
            if not single:
                return
            execute(min(single))

    def run_pair(a: int, b: int) -> bool:
        ran = False
        while True:
            shared = [i for i in front(a) if b in gates[i].qubits and ready(i)]
            if not shared:
                return ran
            execute(min(shared))
            flush(a)
            flush(b)
            ran = True

    def owes(a: int, b: int) -> bool:
        key = (min(a, b), max(a, b))
        return pair_done[key] < min(pair_total[key], sweep + 1)

    for q in list(blocks):
        flush(q)
    rank = {layout.logical_at(line[p]): p for p in range(lo, hi + 1)}
    rnd = 0
    sweep = 0
    idle = 0  # rounds in a row with nothing done; waits are dropped while > 0
    strict = False  # last reversal emitted no gate: drop waits for a whole reversal
    before_sweep = remaining
    while remaining:
        progressed = False
        force = idle > 0 or strict
        for p in range(lo + (rnd % 2), hi, 2):
            a = layout.logical_at(line[p])
            b = layout.logical_at(line[p + 1])
            progressed |= run_pair(a, b)
            if rank[a] > rank[b]:
                continue
            if pending_2q[a] == 0 and pending_2q[b] == 0:
                # interchangeable for the rest of the run: relabel instead of swapping
                rank[a], rank[b] = rank[b], rank[a]
                continue
            if not force and owes(a, b):
                continue
            out.append(swap(line[p], line[p + 1]))
            layout.swap(line[p], line[p + 1])
            swaps += 1
            progressed = True
            progressed |= run_pair(a, b)
        if all(
            rank[layout.logical_at(line[p])] > rank[layout.logical_at(line[p + 1])]
            for p in range(lo, hi)
        ):
            if strict and remaining == before_sweep:
                return _fallback(circuit, topo, initial, "a full reversal emitted no gate")
            strict = remaining == before_sweep
            before_sweep = remaining
            sweep += 1
            rank = {layout.logical_at(line[p]): p for p in range(lo, hi + 1)}
        idle = 0 if progressed else idle + 1
        if idle > 3:
            return _fallback(circuit, topo, initial, "no exchange or gate possible")
        rnd += 1
    for q in sorted(held):
        release(q)

    compiled = Circuit(topo.num_nodes, circuit.num_cbits, tuple(out), circuit.name)
    return CompiledCircuit(compiled, initial, layout, swaps, Strategy.SWAP_NETWORK)


def _fallback(circuit, topo, layout, reason: str) -> CompiledCircuit:
    result = route_greedy(circuit, topo, layout)
    result.warnings.append(f"swap network fell back to greedy routing: {reason}")
    return result


def pair_coverage(circuit: Circuit) -> float:
    """Fraction of qubit pairs that interact at least once."""
    n = circuit.num_qubits
    if n < 2:
        return 1.0
    return len(set(circuit.interaction_pairs())) / (n * (n - 1) / 2)


def default_strategy(circuit: Circuit, threshold: float = NEAR_COMPLETE) -> Strategy:
    """Swap network for (near) all-pairs interaction patterns, greedy otherwise."""
    return Strategy.SWAP_NETWORK if pair_coverage(circuit) >= threshold else Strategy.GREEDY


def route(
    circuit: Circuit,
    topo: LnnTopology,
    strategy: Strategy | str | None = None,
    layout: Layout | None = None,
) -> CompiledCircuit:
    """The linear compiler: pick a strategy, place, route.

    Greedy routing starts from :func:`refine_placement` unless a layout is
    given; the swap network always starts from the given or identity layout.
    Without an explicit strategy, circuits that suit the swap network are
    routed both ways and the result with fewer SWAPs (then lower depth) wins.
    """
    if strategy is None:
        if default_strategy(circuit) is Strategy.GREEDY:
            return route(circuit, topo, Strategy.GREEDY, layout)
        candidates = [route(circuit, topo, s, layout) for s in (Strategy.SWAP_NETWORK, Strategy.GREEDY)]
        return min(candidates, key=lambda r: (r.swap_count, depth(r.circuit)))
    strategy = Strategy(strategy) if isinstance(strategy, str) else strategy
    if strategy is Strategy.SWAP_NETWORK:
        return route_swap_network(circuit, topo, layout)
    if strategy is Strategy.GREEDY:
        if layout is None:
            layout = refine_placement(circuit, topo)
        return route_greedy(circuit, topo, layout)
    raise RoutingError(f"the linear router does not implement {strategy.value}")
