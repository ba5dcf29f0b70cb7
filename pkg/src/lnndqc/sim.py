"""Dense statevector simulation used as a correctness oracle.

Qubit ``k`` is bit ``k`` of the amplitude index (little-endian). Measurements
are never sampled: the caller fixes one outcome per ``MEASURE`` (a branch) and
gets back the post-measurement state together with the branch probability.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, GateKind

MAX_QUBITS = 14
NORM_TOL = 1e-9


class SimulationError(ValueError):
    pass


_S2 = 1 / np.sqrt(2)
_FIXED_1Q = {
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
_FIXED_1Q[GateKind.CORR_X] = _FIXED_1Q[GateKind.X]
_FIXED_1Q[GateKind.CORR_Z] = _FIXED_1Q[GateKind.Z]


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of a gate; two-qubit matrices use basis |q0 q1> with q0 the high bit."""
    k, t = g.kind, g.param
    if k in _FIXED_1Q:
        return _FIXED_1Q[k]
    if k is GateKind.RX:
        c, s = np.cos(t / 2), np.sin(t / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if k is GateKind.RY:
        c, s = np.cos(t / 2), np.sin(t / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k is GateKind.RZ:
        return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
    if k is GateKind.CX:
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if k is GateKind.CZ:
        return np.diag([1, 1, 1, -1]).astype(complex)
    if k is GateKind.CP:
        return np.diag([1, 1, 1, np.exp(1j * t)])
    if k is GateKind.RZZ:
        a, b = np.exp(-0.5j * t), np.exp(0.5j * t)
        return np.diag([a, b, b, a])
    if k is GateKind.SWAP:
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    raise SimulationError(f"{k.value} has no unitary matrix")


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


def _axis(q: int, n: int) -> int:
    return n - 1 - q


def apply_matrix(psi: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    k = len(qubits)
    tensor = psi.reshape((2,) * n)
    axes = [_axis(q, n) for q in qubits]
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(-1)


def _prob_one(psi: np.ndarray, q: int, n: int) -> float:
    tensor = psi.reshape((2,) * n)
    sl = [slice(None)] * n
    sl[_axis(q, n)] = 1
    return float(np.sum(np.abs(tensor[tuple(sl)]) ** 2))


def _project(psi: np.ndarray, q: int, outcome: int, n: int) -> tuple[np.ndarray, float]:
    tensor = psi.reshape((2,) * n).copy()
    sl = [slice(None)] * n
    sl[_axis(q, n)] = 1 - outcome
    tensor[tuple(sl)] = 0.0
    out = tensor.reshape(-1)
    p = float(np.vdot(out, out).real)
    return out, p


def _reset_basis(psi: np.ndarray, q: int, n: int) -> np.ndarray:
    p1 = _prob_one(psi, q, n)
    if p1 < NORM_TOL:
        return psi
    if p1 > 1 - NORM_TOL:
        return apply_matrix(psi, _FIXED_1Q[GateKind.X], [q], n)
    raise SimulationError(f"epr on qubit {q} which is not in a computational basis state (p1={p1:.3g})")


def count_measurements(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.kind is GateKind.MEASURE)


def simulate(
    circuit: Circuit,
    state: np.ndarray | None = None,
    branch: Sequence[int] = (),
    check_norm: bool = False,
) -> tuple[np.ndarray, float]:
    """Run ``circuit`` on ``state`` with measurement outcomes fixed by ``branch``.

    ``branch[i]`` is the outcome of the i-th MEASURE in program order. Returns
    the normalised post-measurement state and the branch probability. An
    impossible branch returns probability 0 and an all-NaN state.

    ``EPR_PREP`` resets its two qubits (they must hold basis states, as after a
    measurement or at start) and prepares ``(|00> + |11>)/sqrt(2)``.
    """
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the simulator limit of {MAX_QUBITS}")
    psi = zero_state(n) if state is None else np.asarray(state, dtype=complex).copy()
    if psi.shape != (2**n,):
        raise SimulationError(f"state has shape {psi.shape}, expected ({2**n},)")
    needed = count_measurements(circuit)
    if len(branch) != needed:
        raise SimulationError(f"branch assigns {len(branch)} outcomes, circuit has {needed} measurements")

    cbits = [0] * circuit.num_cbits
    prob = 1.0
    m = 0
    for g in circuit.gates:
        kind = g.kind
        if kind is GateKind.MEASURE:
            outcome = int(branch[m])
            m += 1
            psi, p = _project(psi, g.qubits[0], outcome, n)
            if p < 1e-14:
                return np.full(2**n, np.nan, dtype=complex), 0.0
            psi /= np.sqrt(p)
            prob *= p
            cbits[g.cbit] = outcome
        elif kind in (GateKind.CORR_X, GateKind.CORR_Z):
            if cbits[g.cbit]:
                psi = apply_matrix(psi, _FIXED_1Q[kind], g.qubits, n)
        elif kind is GateKind.EPR_PREP:
            a, b = g.qubits
            psi = _reset_basis(psi, a, n)
            psi = _reset_basis(psi, b, n)
            psi = apply_matrix(psi, _FIXED_1Q[GateKind.H], [a], n)
            psi = apply_matrix(psi, gate_matrix(Gate(GateKind.CX, (a, b))), [a, b], n)
        else:
            psi = apply_matrix(psi, gate_matrix(g), g.qubits, n)
        if check_norm:
            norm = float(np.vdot(psi, psi).real)
            if abs(norm - 1.0) > NORM_TOL:
                raise SimulationError(f"norm drifted to {norm} after {kind.value}")
    return psi, prob


def unitary(circuit: Circuit) -> np.ndarray:
    """Full unitary of a measurement-free circuit, column j = image of |j>."""
    n = circuit.num_qubits
    if any(g.kind.bookkeeping for g in circuit.gates):
        raise SimulationError("unitary() needs a circuit without measurement or teleport bookkeeping")
    cols = []
    for j in range(2**n):
        e = np.zeros(2**n, dtype=complex)
        e[j] = 1.0
        cols.append(simulate(circuit, e)[0])
    return np.stack(cols, axis=1)


def enumerate_branches(circuit: Circuit) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=count_measurements(circuit)))


def permute_state(psi: np.ndarray, perm: Sequence[int], n: int) -> np.ndarray:
    """Move qubit ``i`` to position ``perm[i]``."""
    tensor = psi.reshape((2,) * n)
    src = [_axis(i, n) for i in range(n)]
    dst = [_axis(perm[i], n) for i in range(n)]
    return np.moveaxis(tensor, src, dst).reshape(-1)


def phase_distance(expected: np.ndarray, actual: np.ndarray) -> float:
    """Max entrywise deviation after fitting one global phase.

    The phase is taken from the largest-magnitude amplitude of ``expected``.
    """
    ref = int(np.argmax(np.abs(expected)))
    if abs(actual[ref]) < 1e-15:
        return float(np.max(np.abs(actual - expected)) + 1.0)
    phase = actual[ref] / expected[ref]
    phase /= abs(phase)
    return float(np.max(np.abs(actual - phase * expected)))


def equivalent_up_to(
    c1: Circuit,
    c2: Circuit,
    perm: Sequence[int] | None = None,
    tol: float = 1e-9,
    num_states: int = 20,
    seed: int = 0,
) -> bool:
    """True iff ``c2 |psi> == phase * P c1 |psi>`` on ``num_states`` random states.

    ``P`` moves qubit ``i`` to position ``perm[i]``. Circuits with measurements
    go through :func:`embedded_action_matches` instead.
    """
    if c1.num_qubits != c2.num_qubits:
        raise SimulationError(f"width mismatch: {c1.num_qubits} vs {c2.num_qubits}")
    n = c1.num_qubits
    perm = list(range(n)) if perm is None else list(perm)
    if sorted(perm) != list(range(n)):
        raise SimulationError("perm is not a permutation")
    if count_measurements(c1) or count_measurements(c2):
        raise SimulationError("equivalent_up_to compares measurement-free circuits")
    rng = np.random.default_rng(seed)
    for _ in range(num_states):
        psi = random_state(n, rng)
        expected = permute_state(simulate(c1, psi)[0], perm, n)
        actual = simulate(c2, psi)[0]
        if phase_distance(expected, actual) > tol:
            return False
    return True


def _compact(compiled: Circuit, extra: Sequence[int]) -> tuple[Circuit, dict[int, int]]:
    used = set(extra)
    for g in compiled.gates:
        used.update(g.qubits)
    order = sorted(used)
    index = {q: i for i, q in enumerate(order)}
    return compiled.with_gates((g.remap(index) for g in compiled.gates), num_qubits=len(order)), index


def _embed_indices(positions: Sequence[int], n_logical: int) -> np.ndarray:
    idx = np.zeros(2**n_logical, dtype=np.int64)
    for i, pos in enumerate(positions):
        bit = (np.arange(2**n_logical) >> i) & 1
        idx |= bit.astype(np.int64) << pos
    return idx


def embedded_action_matches(
    original: Circuit,
    compiled: Circuit,
    initial: Mapping[int, int] | Sequence[int],
    final: Mapping[int, int] | Sequence[int],
    tol: float = 1e-9,
    num_states: int = 20,
    seed: int = 0,
    max_branches: int = 64,
) -> bool:
    """Check a compiled circuit against a measurement-free original.

    Logical qubit ``i`` starts on compiled qubit ``initial[i]`` and must end on
    ``final[i]``; every other compiled qubit starts in |0>. Each checked
    measurement branch must leave the non-data qubits in a computational basis
    state and the data qubits in ``original``'s output state, up to a global
    phase. All branches are enumerated when there are at most
    ``max_branches``; otherwise that many are drawn at random.
    """
    n = original.num_qubits
    if count_measurements(original):
        raise SimulationError("the reference circuit must be measurement-free")
    initial = [initial[i] for i in range(n)]
    final = [final[i] for i in range(n)]
    small, index = _compact(compiled, initial + final)
    m = small.num_qubits
    if m > MAX_QUBITS:
        raise SimulationError(f"compiled circuit touches {m} qubits, limit is {MAX_QUBITS}")
    start = _embed_indices([index[p] for p in initial], n)
    end = _embed_indices([index[p] for p in final], n)
    data_mask = int(np.bitwise_or.reduce(end)) if n else 0

    rng = np.random.default_rng(seed)
    n_meas = count_measurements(small)
    if 2**n_meas <= max_branches:
        branches = list(itertools.product((0, 1), repeat=n_meas))
    else:
        branches = [tuple(int(b) for b in rng.integers(0, 2, n_meas)) for _ in range(max_branches)]

    states = [random_state(n, rng) for _ in range(num_states)]
    any_branch = False
    for phi in states:
        expected = simulate(original, phi)[0]
        psi = np.zeros(2**m, dtype=complex)
        psi[start] = phi
        for branch in branches:
            out, p = simulate(small, psi, branch)
            if p == 0.0:
                continue
            any_branch = True
            rest = np.arange(2**m) & ~data_mask
            mass = np.bincount(rest, weights=np.abs(out) ** 2, minlength=2**m)
            best = int(np.argmax(mass))
            if mass[best] < 1 - tol:
                return False
            actual = out[end | best]
            if phase_distance(expected, actual) > tol:
                return False
    if not any_branch:
        raise SimulationError("no measurement branch has non-zero probability")
    return True
