import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnndqc.bench import qft
from lnndqc.circuit import Circuit, cx, h, measure, swap
from lnndqc.sim import (
    MAX_QUBITS,
    SimulationError,
    enumerate_branches,
    equivalent_up_to,
    random_state,
    simulate,
    unitary,
)

from helpers import random_circuit
from oracles import bit_reverse, dft_matrix


def test_bell_amplitudes():
    psi, p = simulate(Circuit(2, 0, (h(0), cx(0, 1))))
    assert p == 1.0
    np.testing.assert_allclose(psi, [2**-0.5, 0, 0, 2**-0.5], atol=1e-12)


def test_qft3_on_zero_is_uniform():
    psi, _ = simulate(qft(3))
    np.testing.assert_allclose(psi, np.full(8, 8**-0.5), atol=1e-12)


def big_endian(u: np.ndarray, n: int) -> np.ndarray:
    """Re-index a unitary so qubit 0 is the most significant bit."""
    rev = [bit_reverse(k, n) for k in range(2**n)]
    return u[np.ix_(rev, rev)]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_qft_matches_dft_with_bit_reversed_output(n):
    u = big_endian(unitary(qft(n)), n)
    rev = [bit_reverse(k, n) for k in range(2**n)]
    np.testing.assert_allclose(u[rev, :], dft_matrix(n), atol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qft_with_reverse_swaps_is_dft(n):
    np.testing.assert_allclose(big_endian(unitary(qft(n, reverse_swaps=True)), n), dft_matrix(n), atol=1e-10)


def test_cx_directions_differ():
    assert not equivalent_up_to(Circuit(2, 0, (cx(0, 1),)), Circuit(2, 0, (cx(1, 0),)))


def test_swap_is_a_permutation():
    c = Circuit(3, 0, (h(0), cx(0, 2)))
    moved = c.with_gates(c.gates + (swap(0, 1),))
    assert equivalent_up_to(c, moved, perm=[1, 0, 2])
    assert not equivalent_up_to(c, moved)


def test_limits():
    with pytest.raises(SimulationError):
        simulate(Circuit(MAX_QUBITS + 1))
    with pytest.raises(SimulationError):
        simulate(Circuit(1, 1, (h(0), measure(0, 0))), branch=())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_norm_is_preserved(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    c = random_circuit(n, rng.randint(0, 25), rng)
    psi, _ = simulate(c, random_state(n, np.random.default_rng(seed)), check_norm=True)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_branch_probabilities_sum_to_one(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    body = random_circuit(n, rng.randint(0, 12), rng)
    meas = tuple(measure(q, q) for q in rng.sample(range(n), rng.randint(1, n)))
    c = Circuit(n, n, body.gates + meas)
    psi = random_state(n, np.random.default_rng(seed))
    total = sum(simulate(c, psi, b)[1] for b in enumerate_branches(c))
    assert total == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_simulation_is_linear(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    c = random_circuit(n, rng.randint(0, 20), rng)
    gen = np.random.default_rng(seed)
    a, b = random_state(n, gen), random_state(n, gen)
    alpha, beta = complex(*gen.normal(size=2)), complex(*gen.normal(size=2))
    lhs = unitary(c) @ (alpha * a + beta * b)
    rhs = alpha * simulate(c, a)[0] + beta * simulate(c, b)[0]
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)
