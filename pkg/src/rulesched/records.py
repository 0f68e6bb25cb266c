"""Run records, result categories and the CSV results format."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass

CSV_COLUMNS = ("instance", "algo", "seed", "fitness", "feasible", "optimum", "category", "ms", "evals")

OPTIMAL = "optimal"
WITHIN_3 = "within-3"
NON_OPTIMAL = "feasible-non-optimal"
INFEASIBLE = "infeasible"
UNRATED = "feasible"  # feasible, no optimum known
CATEGORIES = (OPTIMAL, WITHIN_3, NON_OPTIMAL, INFEASIBLE, UNRATED)

NEAR_OPTIMAL_UNITS = 3.0
_EPS = 1e-9


class RecordError(ValueError):
    pass


def categorize(fitness: float, feasible: bool, optimum: float | None) -> str:
    """Result category: optimal, within three units, worse, or infeasible."""
    if not feasible:
        return INFEASIBLE
    if optimum is None:
        return UNRATED
    gap = fitness - optimum
    if gap <= _EPS:
        return OPTIMAL
    if gap <= NEAR_OPTIMAL_UNITS + _EPS:
        return WITHIN_3
    return NON_OPTIMAL


@dataclass(frozen=True)
class RunRecord:
    instance: str
    algo: str
    seed: int
    fitness: float
    feasible: bool
    optimum: float | None = None
    ms: float | None = None
    evals: int = 0

    @property
    def category(self) -> str:
        return categorize(self.fitness, self.feasible, self.optimum)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def record_row(rec: RunRecord) -> list[str]:
    return [rec.instance, rec.algo, str(rec.seed), _fmt(rec.fitness), _fmt(rec.feasible),
            _fmt(rec.optimum), rec.category, _fmt(rec.ms), str(rec.evals)]


def write_records(records, stream, header: bool = True):
    writer = csv.writer(stream, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(record_row(rec))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


def read_records(stream, source: str = "<csv>") -> list[RunRecord]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise RecordError(f"{source}: empty file") from None
    if tuple(header) != CSV_COLUMNS:
        raise RecordError(f"{source}: row 1: expected header {','.join(CSV_COLUMNS)}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise RecordError(f"{source}: row {lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        d = dict(zip(CSV_COLUMNS, row))
        try:
            fitness = float(d["fitness"])
            if d["feasible"] not in ("0", "1"):
                raise ValueError(f"feasible must be 0 or 1, got {d['feasible']!r}")
            rec = RunRecord(
                instance=d["instance"], algo=d["algo"], seed=int(d["seed"]), fitness=fitness,
                feasible=d["feasible"] == "1",
                optimum=float(d["optimum"]) if d["optimum"] else None,
                ms=float(d["ms"]) if d["ms"] else None,
                evals=int(d["evals"]),
            )
        except ValueError as exc:
            raise RecordError(f"{source}: row {lineno}: {exc}") from None
        if not math.isfinite(rec.fitness):
            raise RecordError(f"{source}: row {lineno}: fitness must be finite")
        out.append(rec)
    return out


@dataclass(frozen=True)
class Summary:
    key: tuple[str, ...]
    runs: int
    counts: dict
    best: float
    mean: float


def summarize(records) -> tuple[list[Summary], list[Summary], int]:
    """Per-(instance, algo) and per-algo category counts with best/mean fitness.

    Returns ``(per_instance, per_algo, unrated)``, where ``unrated`` counts
    feasible records lacking an optimum.
    """
    def rollup(groups):
        out = []
        for key in sorted(groups):
            recs = groups[key]
            counts = {c: 0 for c in CATEGORIES}
            for r in recs:
                counts[r.category] += 1
            fits = [r.fitness for r in recs]
            out.append(Summary(key, len(recs), counts, min(fits), sum(fits) / len(fits)))
        return out

    by_inst, by_algo = defaultdict(list), defaultdict(list)
    for r in records:
        by_inst[(r.instance, r.algo)].append(r)
        by_algo[(r.algo,)].append(r)
    unrated = sum(1 for r in records if r.category == UNRATED)
    return rollup(by_inst), rollup(by_algo), unrated


def format_report(records) -> str:
    per_inst, per_algo, unrated = summarize(records)
    cols = ("optimal", "within-3", "non-opt", "infeas", "unrated")
    head = f"{'instance':<28} {'algo':<5} {'runs':>4} " + " ".join(f"{c:>8}" for c in cols) \
        + f" {'best':>10} {'mean':>10}"
    lines = [head, "-" * len(head)]
    for s in per_inst:
        lines.append(f"{s.key[0]:<28} {s.key[1]:<5} {s.runs:>4} "
                     + " ".join(f"{s.counts[c]:>8}" for c in CATEGORIES)
                     + f" {s.best:>10.6g} {s.mean:>10.6g}")
    lines.append("")
    lines.append(f"{'algorithm totals':<28} {'':<5} {'runs':>4} " + " ".join(f"{c:>8}" for c in cols)
                 + f" {'best':>10} {'mean':>10}")
    for s in per_algo:
        lines.append(f"{'':<28} {s.key[0]:<5} {s.runs:>4} "
                     + " ".join(f"{s.counts[c]:>8}" for c in CATEGORIES)
                     + f" {s.best:>10.6g} {s.mean:>10.6g}")
    if unrated:
        lines.append("")
        lines.append(f"note: {unrated} feasible record(s) have no optimum; "
                     "they are reported as unrated (feasible/infeasible only)")
    return "\n".join(lines) + "\n"
