"""Per-iteration diagnostics and their CSV serialization.

Numbers are written with 17 significant digits so that parsing an emitted
trace reproduces the in-memory values exactly.  Wall-clock timing is kept in
memory but excluded from files by default: emitted traces are byte-identical
across reruns of the same spec, and timing would break that contract.
"""

import csv
from dataclasses import dataclass, fields

FIELD_ORDER = [
    "t",
    "margin",
    "neg_psi",
    "w_norm",
    "phi_mu",
    "cert_lower",
    "cert_upper",
    "kernel_calls",
]
_INT_FIELDS = {"t", "kernel_calls", "wall_ns"}


@dataclass
class TraceRow:
    t: int
    margin: float
    neg_psi: float
    w_norm: float
    phi_mu: float | None = None
    cert_lower: float | None = None
    cert_upper: float | None = None
    kernel_calls: int | None = None
    wall_ns: int | None = None


def _format(name: str, value) -> str:
    if value is None:
        return ""
    if name in _INT_FIELDS:
        return str(int(value))
    return f"{value:.17g}"


def _parse(name: str, text: str):
    if text == "":
        return None
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def write_trace_csv(rows, path, include_timing: bool = False) -> None:
    names = FIELD_ORDER + (["wall_ns"] if include_timing else [])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow(_format(n, getattr(row, n)) for n in names)


def read_trace_csv(path) -> list[TraceRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        known = {f.name for f in fields(TraceRow)}
        unknown = set(header) - known
        if unknown:
            raise ValueError(f"unknown trace columns {sorted(unknown)}")
        for record in reader:
            kwargs = {n: _parse(n, v) for n, v in zip(header, record)}
            rows.append(TraceRow(**kwargs))
    return rows


def write_margin_table(ts: list[int], margins: dict[str, list[float]], path) -> None:
    """Wide CSV keyed by t with one margin column per method."""
    methods = list(margins)
    for method in methods:
        if len(margins[method]) != len(ts):
            raise ValueError("compare traces disagree on recorded iterations")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"margin_{m}" for m in methods])
        for i, t in enumerate(ts):
            writer.writerow(
                [str(t)] + [_format("margin", margins[m][i]) for m in methods]
            )


def write_compare_csv(columns: dict[str, list[TraceRow]], path) -> None:
    methods = list(columns)
    ts = [row.t for row in columns[methods[0]]]
    for method in methods[1:]:
        if [row.t for row in columns[method]] != ts:
            raise ValueError("compare traces disagree on recorded iterations")
    write_margin_table(ts, {m: [r.margin for r in columns[m]] for m in methods}, path)
