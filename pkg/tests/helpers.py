"""Random circuit generators shared by the tests."""

from __future__ import annotations

import math
import random

from lnndqc.circuit import Circuit, cp, cx, cz, h, rx, rz, rzz, swap

TWO_QUBIT = ("cx", "cz", "cp", "rzz", "swap")


def random_circuit(n: int, num_gates: int, rng: random.Random, kinds=("h", "rx", "rz") + TWO_QUBIT) -> Circuit:
    gates = []
    for _ in range(num_gates):
        kind = rng.choice(kinds) if n > 1 else rng.choice(("h", "rx", "rz"))
        angle = rng.uniform(-math.pi, math.pi)
        if kind in ("h", "rx", "rz"):
            q = rng.randrange(n)
            gates.append({"h": h(q), "rx": rx(angle, q), "rz": rz(angle, q)}[kind])
            continue
        a, b = rng.sample(range(n), 2)
        build = {"cx": cx, "cz": cz, "swap": swap}
        gates.append(build[kind](a, b) if kind in build else {"cp": cp, "rzz": rzz}[kind](angle, a, b))
    return Circuit(n, 0, tuple(gates), "random")


def seeded_circuits(count: int, max_qubits: int, max_gates: int, seed: int, kinds=None) -> list[Circuit]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(2, max_qubits)
        m = rng.randint(1, max_gates)
        out.append(random_circuit(n, m, rng) if kinds is None else random_circuit(n, m, rng, kinds))
    return out
