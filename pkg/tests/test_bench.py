import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnndqc.bench import GraphFamily, ProblemGraph, qaoa, qaoa_angles, qft, read_edge_list, write_edge_list
from lnndqc.circuit import GateKind, gate_count


def test_qft1_is_a_single_h():
    c = qft(1)
    assert [g.kind for g in c.gates] == [GateKind.H]


def test_qft3_gate_list():
    c = qft(3)
    assert [g.kind for g in c.gates].count(GateKind.H) == 3
    assert [g.kind for g in c.gates].count(GateKind.CP) == 3
    assert len(c) == 6


@pytest.mark.parametrize("n", range(1, 15))
def test_qft_structure(n):
    c = qft(n)
    assert gate_count(c) == n + n * (n - 1) // 2
    pairs = [tuple(sorted(g.qubits)) for g in c.gates if g.is_two_qubit]
    assert all(g.kind is GateKind.CP for g in c.gates if g.is_two_qubit)
    assert sorted(pairs) == [(i, j) for i in range(n) for j in range(i + 1, n)]


def test_qft_reverse_swaps():
    c = qft(5, reverse_swaps=True)
    assert [g.qubits for g in c.gates if g.kind is GateKind.SWAP] == [(0, 4), (1, 3)]


def test_qft_rejects_zero():
    with pytest.raises(ValueError):
        qft(0)


def test_ring_qaoa_gate_count():
    assert len(qaoa(ProblemGraph.ring(4), 1)) == 12


def test_three_regular_qaoa_gate_count():
    g = ProblemGraph.three_regular(20, seed=3)
    assert len(g.edges) == 30
    assert len(qaoa(g, 1)) == 70


def test_qaoa_is_deterministic():
    g = ProblemGraph.build("ThreeRegular", 10, seed=1)
    assert qaoa(g, 2, seed=5) == qaoa(g, 2, seed=5)


def test_qaoa_layer_order():
    g = ProblemGraph.ring(4)
    kinds = [gt.kind for gt in qaoa(g, 2).gates]
    assert kinds == [GateKind.H] * 4 + ([GateKind.RZZ] * 4 + [GateKind.RX] * 4) * 2


def test_bad_graphs():
    with pytest.raises(ValueError):
        ProblemGraph.three_regular(7)
    with pytest.raises(ValueError):
        ProblemGraph.ring(2)
    with pytest.raises(ValueError):
        ProblemGraph(3, ((0, 1), (1, 0)), GraphFamily.RING)
    with pytest.raises(ValueError):
        ProblemGraph.erdos_renyi(5, 1.5)
    with pytest.raises(ValueError):
        qaoa(ProblemGraph.ring(4), 0)


def test_edge_list_round_trip(tmp_path):
    g = ProblemGraph.erdos_renyi(8, 0.4, seed=2)
    write_edge_list(tmp_path / "g.edges", g)
    back = read_edge_list(tmp_path / "g.edges", 8)
    assert back.edges == g.edges


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 16), st.floats(0.0, 1.0), st.integers(1, 4), st.integers(0, 10_000))
def test_qaoa_gate_count_formula(n, p_edge, layers, seed):
    g = ProblemGraph.erdos_renyi(n, p_edge, seed)
    assert len(qaoa(g, layers, seed)) == n + layers * (len(g.edges) + n)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_qaoa_angles_in_open_interval(p, seed):
    import math

    for gamma, beta in qaoa_angles(p, seed):
        assert 0 < gamma < math.pi and 0 < beta < math.pi
