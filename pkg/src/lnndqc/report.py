"""Write metric rows as CSV, JSON or Markdown tables."""

from __future__ import annotations

import csv
import enum
import io
import json
import statistics
from collections import defaultdict
from pathlib import Path

from .experiment import MetricsRow


class ReportFormat(enum.Enum):
    CSV = "csv"
    JSON = "json"
    MARKDOWN = "md"

    @classmethod
    def parse(cls, value: "str | ReportFormat") -> "ReportFormat":
        if isinstance(value, cls):
            return value
        aliases = {"csv": cls.CSV, "json": cls.JSON, "md": cls.MARKDOWN, "markdown": cls.MARKDOWN, "markdowntable": cls.MARKDOWN}
        try:
            return aliases[value.lower()]
        except KeyError:
            raise ValueError(f"unknown report format {value!r}") from None


def to_csv(rows: list[MetricsRow], include_time: bool = True) -> str:
    cols = MetricsRow.columns()
    if not include_time:
        cols.remove("wall_time_ms")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([getattr(r, c) for c in cols])
    return buf.getvalue()


def to_json(rows: list[MetricsRow]) -> str:
    return json.dumps([{c: getattr(r, c) for c in MetricsRow.columns()} for r in rows], indent=2) + "\n"


def _compare_table(rows: list[MetricsRow]) -> list[str]:
    by_bench: dict[str, dict[int, dict[str, MetricsRow]]] = defaultdict(lambda: defaultdict(dict))
    for r in rows:
        if r.router in ("Sabre", "Linear") and not r.error:
            by_bench[r.benchmark][r.n][r.router] = r
    out = []
    for bench, sizes in by_bench.items():
        out += [
            f"### {bench}",
            "",
            "| Qubits | SABRE gate count | Linear gate count | SABRE depth | Linear depth |",
            "|---:|---:|---:|---:|---:|",
        ]
        for n in sorted(sizes):
            s, lin = sizes[n].get("Sabre"), sizes[n].get("Linear")
            cell = lambda r, f: "" if r is None else str(getattr(r, f))  # noqa: E731
            out.append(
                f"| {n} | {cell(s, 'gate_count')} | {cell(lin, 'gate_count')} "
                f"| {cell(s, 'depth')} | {cell(lin, 'depth')} |"
            )
        out.append("")
    return out


def _spread(values: list[float]) -> str:
    mean = statistics.fmean(values)
    if min(values) == max(values):
        return f"{mean:.1f}"
    return f"{mean:.1f} ({min(values):g}..{max(values):g})"


def _distribution_table(rows: list[MetricsRow]) -> list[str]:
    groups: dict[tuple[str, int, str], list[MetricsRow]] = defaultdict(list)
    for r in rows:
        if r.router == "Distributed" and not r.error:
            groups[(r.benchmark, r.n, r.strategy)].append(r)
    if not groups:
        return []
    out = [
        "### Two-chip distribution (mean over seeds, min..max in brackets)",
        "",
        "| Benchmark | Qubits | Link | Seeds | Cross-group SWAPs | SWAPs | Gate count | Depth | E-bits |",
        "|---|---:|---|---:|---:|---:|---:|---:|---:|",
    ]
    for (bench, n, strategy), rs in sorted(groups.items()):
        col = lambda f: _spread([getattr(r, f) for r in rs])  # noqa: E731
        out.append(
            f"| {bench} | {n} | {strategy} | {len(rs)} | {col('cross_group_swaps')} | {col('swap_count')} "
            f"| {col('gate_count')} | {col('depth')} | {col('ebits')} |"
        )
    out.append("")
    return out


def to_markdown(rows: list[MetricsRow]) -> str:
    out = _compare_table(rows) + _distribution_table(rows)
    errors = [r for r in rows if r.error]
    if errors:
        out += ["### Errors", ""]
        out += [f"- {r.benchmark} n={r.n} {r.router}/{r.strategy} seed={r.seed}: {r.error}" for r in errors]
        out.append("")
    return "\n".join(out)


_RENDER = {ReportFormat.CSV: to_csv, ReportFormat.JSON: to_json, ReportFormat.MARKDOWN: to_markdown}


def emit_report(rows: list[MetricsRow], fmt: ReportFormat | str, path) -> Path:
    """Write ``rows`` to ``path`` in ``fmt``; returns the path written."""
    if not rows:
        raise ValueError("no rows to report")
    fmt = ReportFormat.parse(fmt)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_RENDER[fmt](rows), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path


def _typed(raw: dict) -> MetricsRow:
    ints = {"n", "seed", "gate_count", "depth", "swap_count", "cross_group_swaps", "ebits", "bookkeeping_gates"}
    vals = {}
    for c in MetricsRow.columns():
        v = raw.get(c, "" if c == "error" else 0)
        if c in ints:
            v = int(v)
        elif c == "wall_time_ms":
            v = float(v)
        vals[c] = v
    return MetricsRow(**vals)


def read_rows(path) -> list[MetricsRow]:
    """Load rows written as CSV or JSON."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return [_typed(r) for r in json.loads(text)]
    return [_typed(r) for r in csv.DictReader(io.StringIO(text))]
