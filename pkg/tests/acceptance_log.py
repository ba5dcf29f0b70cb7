"""One PASS/FAIL line per acceptance criterion, printed at the end of the run."""

LINES: list[str] = []


def record(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    LINES.append(line)
