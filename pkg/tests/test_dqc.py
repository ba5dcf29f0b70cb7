import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnndqc.bench import ProblemGraph, qaoa, qft
from lnndqc.circuit import Circuit, GateKind, cp, cx, cz, h, rz, rzz, swap
from lnndqc.dqc import (
    DistributionError,
    TeleportMode,
    distribute,
    lower_gate_teleport,
    lower_state_teleport,
    partition,
)
from lnndqc.routing import conformance_violations
from lnndqc.sim import embedded_action_matches, enumerate_branches, phase_distance, random_state, simulate
from lnndqc.topology import CouplingGraph, LnnTopology, link_chips, two_chip_system

from helpers import random_circuit

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)


def small_chip(length: int = 4, anchor: int = 1) -> LnnTopology:
    """A line of ``length`` nodes with one leaf hanging off ``anchor``."""
    edges = [(i, i + 1) for i in range(length - 1)] + [(anchor, length)]
    graph = CouplingGraph.from_edges(length + 1, edges)
    return LnnTopology(tuple(range(length)), {anchor: length}, frozenset(), graph)


def small_system(kind: str = "DanglingLink", seed: int = 0):
    chip = small_chip()
    return link_chips(chip, chip, kind, seed)


def preserves(original, dc, states: int = 4) -> bool:
    return embedded_action_matches(
        original, dc.circuit, dc.initial_layout.log2phys, dc.final_layout.log2phys, num_states=states
    )


def kinds(circuit):
    return [g.kind for g in circuit.gates]


# -- partition -----------------------------------------------------------------


def test_partition_qft10():
    part = partition(qft(10), two_chip_system(3, "DanglingLink"))
    assert [part.qubit_chip[q] for q in range(10)] == [0] * 5 + [1] * 5
    assert len(part.cut_gates) == 25
    c = qft(10)
    assert sorted(tuple(sorted(c.gates[i].qubits)) for i in part.cut_gates) == [
        (i, j) for i in range(5) for j in range(5, 10)
    ]


def test_partition_single_qubit():
    part = partition(Circuit(1, 0, (h(0),)), two_chip_system(3, "DanglingLink"))
    assert part.qubit_chip == {0: 0}
    assert part.cut_gates == ()


def test_partition_ring_has_two_cut_edges():
    part = partition(qaoa(ProblemGraph.ring(10), 1), two_chip_system(3, "DanglingLink"))
    assert len(part.cut_gates) == 2


def test_partition_capacity():
    with pytest.raises(DistributionError):
        partition(qft(47), two_chip_system(3, "DanglingLink"))
    with pytest.raises(DistributionError):
        distribute(qft(9), small_system())


# -- state teleportation -------------------------------------------------------


def teleport_circuit():
    return Circuit(3, 2, tuple(lower_state_teleport(0, 1, 2, (0, 1))))


def test_state_teleport_plus_on_every_branch():
    c = teleport_circuit()
    plus = np.kron([1, 0, 0, 0], [1, 1]) / np.sqrt(2)  # qubit 0 in |+>, others |0>
    for branch in enumerate_branches(c):
        out, p = simulate(c, plus.astype(complex), branch)
        assert p == pytest.approx(0.25, abs=1e-12)
        receiver = out.reshape(2, 2, 2)[:, branch[1], branch[0]]
        assert phase_distance(np.array([1, 1]) / np.sqrt(2), receiver) < 1e-9


def test_state_teleport_random_states():
    c = teleport_circuit()
    identity = Circuit(1)
    assert embedded_action_matches(identity, c, [0], [2], tol=1e-9, num_states=50, seed=3)


def test_state_teleport_bell_branches_have_amplitude_half():
    rng = np.random.default_rng(7)
    prefix = Circuit(3, 2, tuple(lower_state_teleport(0, 1, 2, (0, 1))[:3]))
    for _ in range(10):
        psi = random_state(1, rng)
        full = np.kron([1, 0, 0, 0], psi).astype(complex)
        out = simulate(prefix, full)[0].reshape(2, 2, 2)
        for m1 in (0, 1):
            for m2 in (0, 1):
                term = out[:, m2, m1]
                expected = np.linalg.matrix_power(X, m2) @ np.linalg.matrix_power(Z, m1) @ psi
                assert np.linalg.norm(term) == pytest.approx(0.5, abs=1e-12)
                assert phase_distance(expected, 2 * term) < 1e-9


# -- gate teleportation ----------------------------------------------------------


@pytest.mark.parametrize("kind", ["cx", "cz", "cp"])
def test_gate_teleport_matches_direct_gate(kind):
    gate = {"cx": cx(0, 1), "cz": cz(0, 1), "cp": cp(0.7, 0, 1)}[kind]
    ops = [(gate.kind, gate.param, 3)]
    lowered = Circuit(4, 2, tuple(lower_gate_teleport(0, 1, 2, ops, (0, 1))))
    assert kinds(lowered).count(GateKind.EPR_PREP) == 1
    assert embedded_action_matches(Circuit(2, 0, (gate,)), lowered, [0, 3], [0, 3], tol=1e-9, num_states=50, seed=1)


def test_batched_gate_teleport_matches_direct_gates():
    ops = [(GateKind.CX, None, 3), (GateKind.CP, 1.1, 4), (GateKind.CZ, None, 3)]
    lowered = Circuit(5, 2, tuple(lower_gate_teleport(0, 1, 2, ops, (0, 1))))
    original = Circuit(3, 0, (cx(0, 1), cp(1.1, 0, 2), cz(0, 1)))
    assert kinds(lowered).count(GateKind.EPR_PREP) == 1
    assert embedded_action_matches(original, lowered, [0, 3, 4], [0, 3, 4], tol=1e-9, num_states=50, seed=2)


def test_gate_teleport_refuses_uncontrolled_gates():
    with pytest.raises(DistributionError, match="unsupported lowering"):
        lower_gate_teleport(0, 1, 2, [(GateKind.RZZ, 0.3, 3)], (0, 1))


# -- distribute ------------------------------------------------------------------


def test_no_cut_gates_costs_nothing():
    c = Circuit(4, 0, (h(0), cx(0, 1), cz(3, 2), rz(0.2, 3)))
    for mode in TeleportMode:
        dc = distribute(c, two_chip_system(3, "DanglingLink"), mode)
        assert dc.cross_group_swaps == 0 and dc.ebits_consumed == 0


def test_single_cut_cx_gate_teleport():
    c = Circuit(2, 0, (cx(0, 1),))
    dc = distribute(c, two_chip_system(3, "DanglingLink"), "GateTeleport")
    ks = kinds(dc.circuit)
    assert dc.ebits_consumed == 1
    assert ks.count(GateKind.EPR_PREP) == 1
    assert ks.count(GateKind.MEASURE) == 2
    assert ks.count(GateKind.CORR_X) == 1 and ks.count(GateKind.CORR_Z) == 1
    assert dc.nonlocal_sites == [(0, "GateTeleport")]


def test_cz_gate_teleport_keeps_chips():
    topo = two_chip_system(3, "DanglingLink")
    dc = distribute(Circuit(2, 0, (cz(0, 1),)), topo, "GateTeleport")
    for q in (0, 1):
        assert topo.chip_of(dc.initial_layout[q]) == topo.chip_of(dc.final_layout[q]) == dc.partition.qubit_chip[q]


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_shared_control_run(k):
    n = 2 * k
    c = Circuit(n, 0, tuple(cx(0, k + i) for i in range(k)))
    topo = two_chip_system(3, "DanglingLink")
    assert distribute(c, topo, "GateTeleportBatched").ebits_consumed == 1
    assert distribute(c, topo, "GateTeleport").ebits_consumed == k


def expected_runs(circuit: Circuit) -> int:
    """Maximal runs of consecutive gates sharing one control."""
    controls = [g.qubits[0] for g in circuit.gates]
    return sum(1 for i, q in enumerate(controls) if i == 0 or q != controls[i - 1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_batching_matches_run_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 12)
    half = (n + 1) // 2
    gates = []
    for _ in range(rng.randint(1, 15)):
        control = rng.randrange(half) if not gates or rng.random() < 0.5 else gates[-1].qubits[0]
        gates.append(cx(control, rng.randrange(half, n)))
    c = Circuit(n, 0, tuple(gates))
    topo = two_chip_system(3, "DanglingLink")
    assert distribute(c, topo, "GateTeleportBatched").ebits_consumed == expected_runs(c)
    assert distribute(c, topo, "GateTeleport").ebits_consumed == len(gates)


@pytest.mark.parametrize("mode", ["GateTeleport", "GateTeleportBatched"])
def test_gate_modes_refuse_uncontrolled_cut_gates(mode):
    c = Circuit(2, 0, (rzz(0.4, 0, 1),))
    with pytest.raises(DistributionError, match="unsupported lowering"):
        distribute(c, two_chip_system(3, "DanglingLink"), mode)
    assert distribute(c, two_chip_system(3, "DanglingLink"), "StateTeleport").ebits_consumed == 1


def test_state_teleport_counts():
    c = Circuit(2, 0, (rzz(0.4, 0, 1), swap(0, 1), cx(1, 0)))
    dc = distribute(c, two_chip_system(3, "DanglingLink"), "StateTeleport")
    assert dc.cross_group_swaps >= 1
    assert dc.ebits_consumed == kinds(dc.circuit).count(GateKind.EPR_PREP)
    assert dc.swap_count == kinds(dc.circuit).count(GateKind.SWAP)
    assert all(m == "StateTeleport" for _, m in dc.nonlocal_sites)


def test_unknown_mode():
    with pytest.raises(ValueError):
        TeleportMode.parse("Teleport")


def test_sidecar_fields(tmp_path):
    dc = distribute(qft(6), two_chip_system(3, "RandomLink", 2), "Auto")
    dc.write_sidecar(tmp_path / "s.json")
    side = dc.sidecar()
    assert side["ebits_consumed"] == dc.ebits_consumed
    assert side["link"] == list(dc.topo.global_link)
    assert len(side["initial_layout"]) == 6


# -- semantics and invariants ----------------------------------------------------


ALL_KINDS = ("h", "rx", "rz", "cx", "cz", "cp", "rzz", "swap")
CONTROLLED = ("h", "rz", "cx", "cz", "cp")


@pytest.mark.parametrize("kind", ["DanglingLink", "RandomLink"])
@pytest.mark.parametrize("mode", ["Auto", "StateTeleport"])
def test_semantics_on_random_circuits(kind, mode):
    rng = random.Random(f"{kind}-{mode}")
    for trial in range(15):
        n = rng.randint(2, 6)
        c = random_circuit(n, rng.randint(1, 12), rng, ALL_KINDS)
        topo = small_system(kind, trial)
        dc = distribute(c, topo, mode)
        assert not conformance_violations(dc.circuit, topo.graph)
        assert dc.ebits_consumed == kinds(dc.circuit).count(GateKind.EPR_PREP)
        assert preserves(c, dc)


@pytest.mark.parametrize("kind", ["DanglingLink", "RandomLink"])
@pytest.mark.parametrize("mode", ["GateTeleport", "GateTeleportBatched"])
def test_semantics_gate_modes(kind, mode):
    rng = random.Random(len(kind) + len(mode))
    for trial in range(15):
        n = rng.randint(2, 6)
        c = random_circuit(n, rng.randint(1, 12), rng, CONTROLLED)
        topo = small_system(kind, trial)
        dc = distribute(c, topo, mode)
        assert not conformance_violations(dc.circuit, topo.graph)
        assert preserves(c, dc)


@pytest.mark.parametrize("n", [3, 5, 6])
@pytest.mark.parametrize("mode", list(TeleportMode))
def test_qft_semantics(n, mode):
    topo = small_system("DanglingLink")
    dc = distribute(qft(n), topo, mode)
    assert preserves(qft(n), dc)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["Auto", "StateTeleport"]))
def test_topology_is_preserved(seed, mode):
    rng = random.Random(seed)
    topo = two_chip_system(3, "RandomLink", seed)
    before = topo.graph.edges
    c = random_circuit(rng.randint(2, 12), rng.randint(1, 30), rng, ALL_KINDS)
    dc = distribute(c, topo, mode)
    assert topo.graph.edges == before == dc.topo.graph.edges
    assert not conformance_violations(dc.circuit, topo.graph)
    assert dc.ebits_consumed == kinds(dc.circuit).count(GateKind.EPR_PREP)


@pytest.mark.parametrize(
    "circuit",
    [qft(10), qft(20), qaoa(ProblemGraph.erdos_renyi(10, 1.0), 2), qaoa(ProblemGraph.erdos_renyi(20, 1.0), 2)],
    ids=["qft10", "qft20", "qaoaK10", "qaoaK20"],
)
def test_dangling_never_worse_per_seed(circuit):
    dangling = distribute(circuit, two_chip_system(3, "DanglingLink"), "StateTeleport").cross_group_swaps
    for seed in range(10):
        random_link = distribute(circuit, two_chip_system(3, "RandomLink", seed), "StateTeleport")
        assert dangling <= random_link.cross_group_swaps
