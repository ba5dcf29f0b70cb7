"""Experiment runner: compile benchmark sweeps and collect metric rows."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

from .bench import GraphFamily, ProblemGraph, qaoa, qft
from .circuit import Accounting, Circuit, depth, gate_count
from .dqc import DistributionError, TeleportMode, distribute
from .routing import RouterConfig, RoutingError, conformance_violations, route, route_sabre
from .topology import LinkKind, TopologyError, heavy_hex, to_lnn, two_chip_system

ROUTERS = ("Linear", "Sabre")
MAX_D = 15


@dataclass(frozen=True)
class DistributionConfig:
    mode: str = TeleportMode.STATE.value
    strategies: tuple[str, ...] = (LinkKind.DANGLING.value, LinkKind.RANDOM.value)
    seeds: tuple[int, ...] = tuple(range(10))

    def __post_init__(self):
        object.__setattr__(self, "mode", TeleportMode.parse(self.mode).value)
        object.__setattr__(self, "strategies", tuple(LinkKind.parse(s).value for s in self.strategies))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.strategies or not self.seeds:
            raise ValueError("distribution needs at least one strategy and one seed")


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: str = "qft"
    qubit_sizes: tuple[int, ...] = (10, 20, 50)
    routers: tuple[str, ...] = ROUTERS
    family: str = GraphFamily.ERDOS_RENYI.value
    edge_prob: float | None = 1.0
    layers: int = 2
    instance_seed: int = 0
    distribution: DistributionConfig | None = None
    accounting: str = Accounting.SWAP_AS_ONE.value
    heavy_hex_d: dict[int, int] = field(default_factory=dict)
    seed: int = 0
    sabre_trials: int = 3
    workers: int = 1
    output: str = "results"

    def __post_init__(self):
        if self.benchmark not in ("qft", "qaoa"):
            raise ValueError(f"benchmark must be 'qft' or 'qaoa', got {self.benchmark!r}")
        sizes = tuple(int(n) for n in self.qubit_sizes)
        if not sizes or any(n < 2 for n in sizes):
            raise ValueError("qubit sizes must be integers >= 2")
        object.__setattr__(self, "qubit_sizes", sizes)
        routers = tuple(_router_name(r) for r in self.routers)
        object.__setattr__(self, "routers", routers)
        if not routers and self.distribution is None:
            raise ValueError("nothing to run: no routers and no distribution")
        object.__setattr__(self, "family", GraphFamily.parse(self.family).value)
        object.__setattr__(self, "accounting", Accounting.parse(self.accounting).value)
        object.__setattr__(self, "heavy_hex_d", {int(k): int(v) for k, v in self.heavy_hex_d.items()})
        for n, d in self.heavy_hex_d.items():
            if d < 3 or d % 2 == 0:
                raise ValueError(f"heavy-hex distance for n={n} must be odd and >= 3, got {d}")
        if self.layers < 1 or self.workers < 1 or self.sabre_trials < 1:
            raise ValueError("layers, workers and sabre_trials must be >= 1")

    def to_json(self) -> dict:
        out = asdict(self)
        out["qubit_sizes"] = list(self.qubit_sizes)
        out["routers"] = list(self.routers)
        out["heavy_hex_d"] = {str(k): v for k, v in sorted(self.heavy_hex_d.items())}
        if self.distribution is not None:
            out["distribution"] = {
                "mode": self.distribution.mode,
                "strategies": list(self.distribution.strategies),
                "seeds": list(self.distribution.seeds),
            }
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        dist = data.get("distribution")
        if dist is not None:
            data["distribution"] = DistributionConfig(**dist)
        for key in ("qubit_sizes", "routers"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _router_name(name: str) -> str:
    for r in ROUTERS:
        if name.lower() == r.lower():
            return r
    raise ValueError(f"unknown router {name!r}; choose from {ROUTERS}")


@dataclass(frozen=True)
class MetricsRow:
    benchmark: str
    n: int
    router: str
    strategy: str
    seed: int
    gate_count: int
    depth: int
    swap_count: int
    cross_group_swaps: int
    ebits: int
    accounting: str
    wall_time_ms: float
    bookkeeping_gates: int = 0
    error: str = ""

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def key(self) -> tuple:
        return (self.benchmark, self.n, self.router, self.strategy, self.seed)


# ---------------------------------------------------------------------------
# instances


def build_circuit(cfg: ExperimentConfig, n: int) -> Circuit:
    if cfg.benchmark == "qft":
        return qft(n)
    graph = ProblemGraph.build(cfg.family, n, cfg.instance_seed, cfg.edge_prob)
    return qaoa(graph, cfg.layers, cfg.instance_seed)


def benchmark_name(cfg: ExperimentConfig) -> str:
    if cfg.benchmark == "qft":
        return "qft"
    tag = cfg.family if cfg.edge_prob is None or cfg.family != GraphFamily.ERDOS_RENYI.value else f"{cfg.family}{cfg.edge_prob:g}"
    return f"qaoa-{tag}-p{cfg.layers}"


def smallest_distance(n: int, chips: int = 1) -> int:
    """Smallest heavy-hex distance whose backbone holds ``n`` qubits over ``chips`` chips.

    On two chips each chip must hold its half even when a backbone node is
    taken by the link.
    """
    need = n if chips == 1 else (n + 1) // 2 + 1
    for d in range(3, MAX_D + 1, 2):
        if len(to_lnn(heavy_hex(d)).line) >= need:
            return d
    raise TopologyError(f"no heavy-hex distance up to {MAX_D} holds {n} qubits")


def distance_for(cfg: ExperimentConfig, n: int, chips: int = 1) -> int:
    return cfg.heavy_hex_d.get(n) or smallest_distance(n, chips)


# ---------------------------------------------------------------------------
# jobs


@dataclass(frozen=True)
class _Job:
    cfg: ExperimentConfig
    n: int
    router: str
    strategy: str | None = None
    seed: int | None = None


def _bookkeeping(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.kind.bookkeeping)


def _row(job: _Job, strategy: str, seed: int, **counters) -> MetricsRow:
    base = dict(gate_count=0, depth=0, swap_count=0, cross_group_swaps=0, ebits=0, wall_time_ms=0.0)
    base.update(counters)
    return MetricsRow(
        benchmark=benchmark_name(job.cfg),
        n=job.n,
        router=job.router,
        strategy=strategy,
        seed=seed,
        accounting=job.cfg.accounting,
        **base,
    )


def _run_job(job: _Job) -> MetricsRow:
    cfg = job.cfg
    if job.router == "Distributed":
        strategy, seed = job.strategy, job.seed
    else:
        strategy, seed = job.router, cfg.seed
    start = time.perf_counter()
    try:
        circuit = build_circuit(cfg, job.n)
        if job.router == "Distributed":
            d = distance_for(cfg, job.n, chips=2)
            topo = two_chip_system(d, strategy, seed)
            dc = distribute(circuit, topo, cfg.distribution.mode)
            out, graph = dc.circuit, topo.graph
            counters = dict(
                swap_count=dc.swap_count, cross_group_swaps=dc.cross_group_swaps, ebits=dc.ebits_consumed
            )
        elif job.router == "Linear":
            d = distance_for(cfg, job.n)
            lnn = to_lnn(heavy_hex(d))
            compiled = route(circuit, lnn)
            out, graph = compiled.circuit, lnn.graph
            strategy = compiled.strategy.value
            counters = dict(swap_count=compiled.swap_count)
        else:
            d = distance_for(cfg, job.n)
            graph = heavy_hex(d)
            compiled = route_sabre(circuit, graph, RouterConfig(seed=cfg.seed, trials=cfg.sabre_trials))
            out = compiled.circuit
            counters = dict(swap_count=compiled.swap_count)
        elapsed = (time.perf_counter() - start) * 1000.0
        bad = conformance_violations(out, graph)
        if bad:
            i, pair = bad[0]
            return _row(job, strategy, seed, error=f"{len(bad)} gates off the coupling graph, first: gate {i} on {pair}")
        return _row(
            job,
            strategy,
            seed,
            gate_count=gate_count(out, cfg.accounting),
            depth=depth(out),
            bookkeeping_gates=_bookkeeping(out),
            wall_time_ms=round(elapsed, 3),
            **counters,
        )
    except (RoutingError, DistributionError, TopologyError, ValueError) as exc:
        return _row(job, strategy, seed, error=f"{type(exc).__name__}: {exc}")


def _jobs(cfg: ExperimentConfig) -> list[_Job]:
    jobs = []
    for n in cfg.qubit_sizes:
        for router in cfg.routers:
            jobs.append(_Job(cfg, n, router))
        if cfg.distribution is not None:
            for strategy in cfg.distribution.strategies:
                for seed in cfg.distribution.seeds:
                    jobs.append(_Job(cfg, n, "Distributed", strategy, seed))
    return jobs


def run_experiment(cfg: ExperimentConfig) -> list[MetricsRow]:
    """One row per (size, router or link strategy, seed), in a fixed order.

    Failures become rows with an ``error`` message; the sweep carries on.
    """
    jobs = _jobs(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(job) for job in jobs]


__all__ = [
    "DistributionConfig",
    "ExperimentConfig",
    "MetricsRow",
    "benchmark_name",
    "build_circuit",
    "run_experiment",
    "smallest_distance",
]
