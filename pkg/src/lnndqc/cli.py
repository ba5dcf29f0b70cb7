"""Command-line front end: ``lnndqc <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bench import ProblemGraph, qaoa, qft, write_edge_list
from .circuit import Accounting, depth, gate_count
from .dqc import DistributionError, distribute
from .experiment import ExperimentConfig, run_experiment
from .qasm import QasmError, emit_qasm, parse_qasm
from .report import emit_report, read_rows
from .routing import RouterConfig, RoutingError, conformance_violations, route, route_sabre
from .sim import SimulationError, embedded_action_matches, simulate
from .topology import (
    TopologyError,
    heavy_hex,
    render,
    save_topology,
    to_lnn,
    two_chip_system,
)


class CliError(Exception):
    pass


def _read_circuit(path: str):
    try:
        return parse_qasm(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _metrics(circuit, accounting) -> dict:
    return {
        "gate_count": gate_count(circuit, accounting),
        "depth": depth(circuit),
        "accounting": Accounting.parse(accounting).value,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_bench(args) -> int:
    if args.benchmark == "qft":
        circuit = qft(args.n, reverse_swaps=args.reverse_swaps)
    else:
        graph = ProblemGraph.build(args.family, args.n, args.seed, args.edge_prob)
        circuit = qaoa(graph, args.layers, args.seed)
        if args.out:
            write_edge_list(Path(args.out).with_suffix(".edges"), graph)
    text = emit_qasm(circuit)
    if args.out:
        _write(Path(args.out), text)
        print(f"wrote {args.out} ({len(circuit)} gates on {circuit.num_qubits} qubits)")
    else:
        sys.stdout.write(text)
    return 0


def cmd_topo(args) -> int:
    if args.link:
        topo = two_chip_system(args.d, args.link, args.seed)
        print(f"two chips of {topo.chips[0].num_nodes} nodes, link {topo.link_kind.value} on {topo.global_link}")
        for chip in topo.chips[:1]:
            print(render(chip))
    else:
        full = heavy_hex(args.d)
        topo = to_lnn(full)
        print(f"heavy_hex({args.d}): {full.num_nodes} nodes, {len(full.edges)} edges")
        print(f"backbone {len(topo.line)} nodes, {len(topo.dangling)} dangling, {len(topo.removed_edges)} edges removed")
        print(render(topo))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        save_topology(args.out, topo)
        print(f"wrote {args.out}")
    return 0


def cmd_compile(args) -> int:
    circuit = _read_circuit(args.circuit)
    if args.router == "sabre":
        graph = heavy_hex(args.d)
        compiled = route_sabre(circuit, graph, RouterConfig(seed=args.seed, trials=args.trials))
    else:
        lnn = to_lnn(heavy_hex(args.d))
        graph = lnn.graph
        compiled = route(circuit, lnn, args.strategy)
    bad = conformance_violations(compiled.circuit, graph)
    if bad:
        raise CliError(f"{len(bad)} gates off the coupling graph")
    for w in compiled.warnings:
        print(f"warning: {w}", file=sys.stderr)
    summary = {**_metrics(compiled.circuit, args.accounting), **compiled.sidecar()}
    if args.out:
        out = Path(args.out)
        _write(out, emit_qasm(compiled.circuit))
        compiled.write_sidecar(out.with_suffix(".json"))
        print(f"wrote {out} and {out.with_suffix('.json')}")
    print(json.dumps({k: summary[k] for k in ("gate_count", "depth", "swap_count", "strategy", "accounting")}))
    return 0


def cmd_distribute(args) -> int:
    circuit = _read_circuit(args.circuit)
    topo = two_chip_system(args.d, args.link, args.seed)
    dc = distribute(circuit, topo, args.mode)
    bad = conformance_violations(dc.circuit, topo.graph)
    if bad:
        raise CliError(f"{len(bad)} gates off the coupling graph")
    if args.out:
        out = Path(args.out)
        _write(out, emit_qasm(dc.circuit))
        dc.write_sidecar(out.with_suffix(".json"))
        print(f"wrote {out} and {out.with_suffix('.json')}")
    summary = _metrics(dc.circuit, args.accounting)
    summary.update(
        swap_count=dc.swap_count, cross_group_swaps=dc.cross_group_swaps, ebits=dc.ebits_consumed, mode=dc.mode.value
    )
    print(json.dumps(summary))
    return 0


def cmd_verify(args) -> int:
    original = _read_circuit(args.original)
    compiled = _read_circuit(args.compiled)
    sidecar = Path(args.sidecar) if args.sidecar else Path(args.compiled).with_suffix(".json")
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read sidecar {sidecar}: {exc.strerror}") from exc
    if args.dump_amplitudes:
        psi, _ = simulate(original)
        amps = [[float(a.real), float(a.imag)] for a in np.asarray(psi)]
        _write(Path(args.dump_amplitudes), json.dumps({"num_qubits": original.num_qubits, "amplitudes": amps}))
    ok = embedded_action_matches(
        original,
        compiled,
        meta["initial_layout"],
        meta["final_layout"],
        tol=args.tol,
        num_states=args.states,
        seed=args.seed,
    )
    print("equivalent" if ok else "NOT equivalent")
    return 0 if ok else 1


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.accounting is not None:
        changes["accounting"] = Accounting.parse(args.accounting).value
    if args.out is not None:
        changes["output"] = args.out
    if args.workers is not None:
        changes["workers"] = args.workers
    cfg = replace(cfg, **changes)
    rows = run_experiment(cfg)
    out = Path(cfg.output)
    for fmt, name in (("csv", "rows.csv"), ("json", "rows.json"), ("md", "report.md")):
        emit_report(rows, fmt, out / name)
    print(f"{len(rows)} rows written to {out}/rows.csv, rows.json and report.md")
    errors = [r for r in rows if r.error]
    for r in errors:
        print(f"error: {r.benchmark} n={r.n} {r.router}/{r.strategy} seed={r.seed}: {r.error}", file=sys.stderr)
    return 1 if errors else 0


def cmd_report(args) -> int:
    rows = read_rows(args.rows)
    if not rows:
        raise CliError(f"{args.rows} holds no rows")
    out = args.out or str(Path(args.rows).with_suffix("." + args.format.replace("markdown", "md")))
    emit_report(rows, args.format, out)
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lnndqc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_default=0, accounting=True):
        sp.add_argument("--seed", type=int, default=seed_default, help="random seed")
        sp.add_argument("--out", help="output path")
        if accounting:
            sp.add_argument(
                "--accounting",
                default=Accounting.SWAP_AS_ONE.value,
                choices=[a.value for a in Accounting],
                help="how SWAPs count toward gate totals",
            )

    sp = sub.add_parser("gen-bench", help="write a QFT or QAOA circuit as QASM")
    sp.add_argument("benchmark", choices=["qft", "qaoa"])
    sp.add_argument("-n", type=int, required=True, help="qubit count")
    sp.add_argument("--family", default="ErdosRenyi", help="QAOA problem graph: Ring, ThreeRegular, ErdosRenyi")
    sp.add_argument("--edge-prob", type=float, default=1.0, help="ErdosRenyi edge probability")
    sp.add_argument("--layers", type=int, default=2, help="QAOA layers p")
    sp.add_argument("--reverse-swaps", action="store_true", help="append the QFT output reversal")
    common(sp, accounting=False)
    sp.set_defaults(func=cmd_gen_bench)

    sp = sub.add_parser("topo", help="build a heavy-hex chip, its LNN reduction, or a two-chip system")
    sp.add_argument("-d", type=int, default=3, help="heavy-hex distance (odd, >= 3)")
    sp.add_argument("--link", choices=["DanglingLink", "RandomLink"], help="build two linked chips")
    common(sp, accounting=False)
    sp.set_defaults(func=cmd_topo)

    sp = sub.add_parser("compile", help="route a QASM circuit onto one chip")
    sp.add_argument("circuit")
    sp.add_argument("--router", choices=["linear", "sabre"], default="linear")
    sp.add_argument("--strategy", choices=["Greedy", "SwapNetwork"], help="linear strategy (default: by circuit)")
    sp.add_argument("-d", type=int, default=3, help="heavy-hex distance")
    sp.add_argument("--trials", type=int, default=3, help="SABRE trials")
    common(sp)
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("distribute", help="compile a QASM circuit onto two linked chips")
    sp.add_argument("circuit")
    sp.add_argument("-d", type=int, default=3, help="heavy-hex distance of each chip")
    sp.add_argument("--link", choices=["DanglingLink", "RandomLink"], default="DanglingLink")
    sp.add_argument(
        "--mode", default="Auto", choices=["Auto", "StateTeleport", "GateTeleport", "GateTeleportBatched"]
    )
    common(sp)
    sp.set_defaults(func=cmd_distribute)

    sp = sub.add_parser("verify", help="check a compiled circuit against its source by simulation")
    sp.add_argument("original")
    sp.add_argument("compiled")
    sp.add_argument("--sidecar", help="layout sidecar JSON (default: next to the compiled file)")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--states", type=int, default=10, help="random input states")
    sp.add_argument("--dump-amplitudes", metavar="PATH", help="write the source circuit's output state on |0...0> as JSON")
    common(sp, accounting=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("experiment", help="run a sweep from a JSON config")
    sp.add_argument("config")
    sp.add_argument("--seed", type=int, help="override the router seed")
    sp.add_argument("--out", help="override the output directory")
    sp.add_argument("--accounting", choices=[a.value for a in Accounting], help="override the gate accounting")
    sp.add_argument("--workers", type=int, help="parallel jobs")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("report", help="re-render saved rows")
    sp.add_argument("rows", help="rows.csv or rows.json")
    sp.add_argument("--format", default="md", choices=["csv", "json", "md", "markdown"])
    sp.add_argument("--out", help="output path")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        CliError,
        QasmError,
        RoutingError,
        DistributionError,
        TopologyError,
        SimulationError,
        ValueError,
        KeyError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
