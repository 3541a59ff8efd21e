"""CSV and markdown serialization of traces and run summaries.

Trace files and ``runs.csv`` use 17 significant digits so they round-trip
exactly; the summary table uses 6. Absent optionals are empty fields and
non-finite numbers are written as ``inf`` / ``-inf`` / ``nan``.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from pathlib import Path

from .harness import RunResult, Status, TraceRow

TRACE_HEADER = ("t", "f", "grad_norm", "dist_to_opt", "alpha_t")
SUMMARY_HEADER = ("Problem", "Optimizer", "Final Loss", "Final ‖∇f‖", "Iter to 1e-3",
                  "Iter to 1e-6", "Total Iters", "Final Dist")
RUNS_HEADER = ("problem", "optimizer", "seed", "status", "iters_to_primary", "iters_to_high",
               "divergence_iter", "total_iters", "max_iters", "final_f", "final_grad_norm",
               "final_dist")


def fmt_full(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def fmt_short(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".6g")


def _opt_float(s: str) -> float | None:
    return None if s == "" else float(s)


def _opt_int(s: str) -> int | None:
    return None if s == "" else int(s)


def _write(rows, header, fmt) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    return buf.getvalue()


def slugify(text: str) -> str:
    return re.sub(r"[^a-z0-9.]+", "-", text.lower()).strip("-")


# --- traces -------------------------------------------------------------------

def trace_to_csv(trace: list[TraceRow]) -> str:
    rows = [(r.t, r.f, r.grad_norm, r.dist_to_opt, r.alpha_t) for r in trace]
    return _write(rows, TRACE_HEADER, fmt_full)


def parse_trace_csv(text: str) -> list[TraceRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != TRACE_HEADER:
        raise ValueError(f"unexpected trace header {header}")
    return [TraceRow(int(t), float(f), float(g), _opt_float(d), _opt_float(a))
            for t, f, g, d, a in reader]


# --- per-run records ------------------------------------------------------------

def runs_to_csv(results: list[RunResult]) -> str:
    rows = [
        (r.problem, r.optimizer, r.seed, r.status.value, r.iters_to_primary, r.iters_to_high,
         r.divergence_iter, r.total_iters, r.max_iters, r.final_f, r.final_grad_norm, r.final_dist)
        for r in results
    ]
    return _write(rows, RUNS_HEADER, fmt_full)


def parse_runs_csv(text: str) -> list[RunResult]:
    """Inverse of :func:`runs_to_csv` (traces are not carried)."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != RUNS_HEADER:
        raise ValueError(f"unexpected runs header {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(RunResult(
            status=Status(row["status"]),
            iters_to_primary=_opt_int(row["iters_to_primary"]),
            iters_to_high=_opt_int(row["iters_to_high"]),
            divergence_iter=_opt_int(row["divergence_iter"]),
            final_f=float(row["final_f"]),
            final_grad_norm=float(row["final_grad_norm"]),
            final_dist=_opt_float(row["final_dist"]),
            max_iters=int(row["max_iters"]),
            problem=row["problem"],
            optimizer=row["optimizer"],
            seed=_opt_int(row["seed"]),
        ))
    return out


# --- summary table ------------------------------------------------------------

@dataclass
class SummaryRow:
    problem: str
    optimizer: str
    final_f: float
    final_grad_norm: float
    iters_to_primary: int | None
    iters_to_high: int | None
    total_iters: int
    final_dist: float | None

    @classmethod
    def from_result(cls, r: RunResult) -> SummaryRow:
        return cls(r.problem, r.optimizer, r.final_f, r.final_grad_norm, r.iters_to_primary,
                   r.iters_to_high, r.total_iters, r.final_dist)

    def cells(self) -> tuple:
        return (self.problem, self.optimizer, self.final_f, self.final_grad_norm,
                self.iters_to_primary, self.iters_to_high, self.total_iters, self.final_dist)


def _median_low(values):
    """Lower median; None counts as +inf and NaN sorts after everything."""
    def key(v):
        if v is None:
            return (1, 0.0)
        if isinstance(v, float) and math.isnan(v):
            return (2, 0.0)
        return (0, v)
    ordered = sorted(values, key=key)
    return ordered[(len(ordered) - 1) // 2]


def median_summary(results: list[RunResult]) -> list[SummaryRow]:
    """Collapse seeds: one row per (problem, optimizer), lower median per column."""
    groups: dict[tuple[str, str], list[RunResult]] = {}
    for r in results:
        groups.setdefault((r.problem, r.optimizer), []).append(r)
    rows = []
    for (problem, optimizer), rs in groups.items():
        rows.append(SummaryRow(
            problem, optimizer,
            _median_low([r.final_f for r in rs]),
            _median_low([r.final_grad_norm for r in rs]),
            _median_low([r.iters_to_primary for r in rs]),
            _median_low([r.iters_to_high for r in rs]),
            _median_low([r.total_iters for r in rs]),
            _median_low([r.final_dist for r in rs]),
        ))
    return rows


def summary_to_csv(rows: list[SummaryRow]) -> str:
    return _write([r.cells() for r in rows], SUMMARY_HEADER, fmt_short)


def parse_summary_csv(text: str) -> list[SummaryRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SUMMARY_HEADER:
        raise ValueError(f"unexpected summary header {header}")
    return [
        SummaryRow(p, o, float(f), float(g), _opt_int(i1), _opt_int(i2), int(tot), _opt_float(dist))
        for p, o, f, g, i1, i2, tot, dist in reader
    ]


def summary_to_markdown(rows: list[SummaryRow], results: list[RunResult] | None = None) -> str:
    lines = ["| " + " | ".join(SUMMARY_HEADER) + " |",
             "|" + "---|" * len(SUMMARY_HEADER)]
    for row in rows:
        cells = [c if isinstance(c, str) else fmt_short(c) for c in row.cells()]
        lines.append("| " + " | ".join(c or "-" for c in cells) + " |")
    if results:
        notes = _divergence_notes(results)
        if notes:
            lines += ["", "Divergences:", ""] + [f"- {n}" for n in notes]
    return "\n".join(lines) + "\n"


def _divergence_notes(results: list[RunResult]) -> list[str]:
    groups: dict[tuple[str, str], list[RunResult]] = {}
    for r in results:
        groups.setdefault((r.problem, r.optimizer), []).append(r)
    notes = []
    for (problem, optimizer), rs in groups.items():
        div = [r for r in rs if r.status is Status.DIVERGED]
        if div:
            where = ", ".join(f"seed {r.seed}: iteration {r.divergence_iter}" for r in div)
            notes.append(f"{optimizer} on {problem} diverged in {len(div)}/{len(rs)} runs ({where})")
    return notes


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
