"""Baseline-vs-multilayer comparison runs and their reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from mlsynth.builder import BuilderParams, build_redundant_mlg
from mlsynth.errors import MlsynthError, NoData
from mlsynth.instance import DEFAULT_VARIANTS, Instance, generate_instance
from mlsynth.mlg import validate
from mlsynth.optimizer import (
    SearchParams,
    check_solution,
    solve_full_lsr_baseline,
    solve_multilayer,
)

log = logging.getLogger(__name__)

REFERENCE_BAND = (10.0, 16.0)
CSV_COLUMNS = ("node_count", "variant", "seed", "baseline_cost", "multilayer_cost",
               "savings_pct", "baseline_ms", "multilayer_ms")
DEFAULT_NODE_COUNTS = (20, 25, 30, 35, 40, 45, 50)


@dataclass(frozen=True)
class SuiteConfig:
    node_counts: tuple[int, ...] = DEFAULT_NODE_COUNTS
    variants: tuple[str, ...] = DEFAULT_VARIANTS
    seeds: tuple[int, ...] = (0, 1, 2)
    builder: BuilderParams = BuilderParams()
    search: SearchParams = SearchParams()
    timing: bool = False
    verify: bool = False
    workers: int | None = None


@dataclass(frozen=True)
class ComparisonRow:
    node_count: int
    variant: str
    seed: int
    baseline_cost: float | None
    multilayer_cost: float | None
    savings_pct: float | None
    baseline_ms: float | None = None
    multilayer_ms: float | None = None
    error: str | None = None
    violations: int | None = None
    hit_iteration_limit: bool | None = None


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]
    summary: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SavingsSummary:
    mean: float
    min: float
    max: float
    in_reference_band: bool


def savings_pct(baseline: float, multilayer: float) -> float:
    return 100.0 * (baseline - multilayer) / baseline if baseline else 0.0


def compare_instance(instance: Instance, builder: BuilderParams = BuilderParams(),
                     search: SearchParams = SearchParams(), timing: bool = False,
                     verify: bool = False) -> ComparisonRow:
    """Solve one instance both ways. Solver failures land in ``error``.

    ``verify`` re-checks both solutions and the redundant graph and counts
    every violation found.
    """
    meta = instance.meta
    key = (meta.get("node_count", len(instance.nodes)), meta.get("variant", "custom"),
           meta.get("seed", 0))
    try:
        t0 = time.perf_counter()
        base = solve_full_lsr_baseline(instance)
        t1 = time.perf_counter()
        mlg = build_redundant_mlg(instance, builder)
        multi = solve_multilayer(instance, builder, search, mlg=mlg)
        t2 = time.perf_counter()
    except MlsynthError as exc:
        return ComparisonRow(*key, None, None, None, error=str(exc))
    violations = None
    if verify:
        violations = (len(validate(mlg)) + len(check_solution(instance, base))
                      + len(check_solution(instance, multi)))
    b, m = base.cost.grand_total, multi.cost.grand_total
    return ComparisonRow(
        *key, b, m, savings_pct(b, m),
        round((t1 - t0) * 1000, 1) if timing else None,
        round((t2 - t1) * 1000, 1) if timing else None,
        violations=violations,
        hit_iteration_limit=multi.stats["hit_iteration_limit"],
    )


def _run_one(task: tuple) -> ComparisonRow:
    n, variant, seed, builder, search, timing, verify = task
    try:
        instance = generate_instance(n, variant, seed)
    except MlsynthError as exc:
        return ComparisonRow(n, str(variant), seed, None, None, None, error=str(exc))
    return compare_instance(instance, builder, search, timing, verify)


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("MLSYNTH_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def run_comparison(config: SuiteConfig = SuiteConfig()) -> ComparisonTable:
    """Generate every (node count, variant, seed) instance and compare both solvers."""
    tasks = [(n, v, s, config.builder, config.search, config.timing, config.verify)
             for n in config.node_counts for v in config.variants for s in config.seeds]
    workers = worker_count(config.workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, tasks))
    else:
        rows = [_run_one(t) for t in tasks]
    rank = {v: i for i, v in enumerate(config.variants)}
    rows.sort(key=lambda r: (r.node_count, rank.get(r.variant, len(rank)), r.variant, r.seed))
    return ComparisonTable(tuple(rows), summarize(rows))


def summarize(rows) -> dict[str, Any]:
    """Aggregate savings; a table without usable rows is flagged NO_DATA."""
    ok = [r for r in rows if r.error is None]
    errors = len(rows) - len(ok)
    if not ok:
        return {"status": "NO_DATA", "rows": len(rows), "errors": errors}
    values = [r.savings_pct for r in ok]
    by_nodes: dict[int, list[float]] = {}
    by_variant: dict[str, list[float]] = {}
    for r in ok:
        by_nodes.setdefault(r.node_count, []).append(r.savings_pct)
        by_variant.setdefault(r.variant, []).append(r.savings_pct)
    mean = statistics.fmean(values)
    return {
        "status": "OK",
        "rows": len(rows),
        "errors": errors,
        "mean_savings_pct": mean,
        "min_savings_pct": min(values),
        "max_savings_pct": max(values),
        "per_node_count": {str(k): statistics.fmean(v) for k, v in by_nodes.items()},
        "per_variant": {k: statistics.fmean(v) for k, v in by_variant.items()},
        "in_reference_band": REFERENCE_BAND[0] <= mean <= REFERENCE_BAND[1],
    }


def summarize_savings(table: ComparisonTable) -> SavingsSummary:
    values = [r.savings_pct for r in table.rows if r.error is None]
    if not values:
        raise NoData("no comparison rows to summarize")
    mean = statistics.fmean(values)
    return SavingsSummary(mean, min(values), max(values),
                          REFERENCE_BAND[0] <= mean <= REFERENCE_BAND[1])


# --------------------------------------------------------------------------
# reports


def _fmt(x: float | None, digits: int | None = None) -> str:
    if x is None:
        return ""
    if digits is not None:
        return f"{x:.{digits}f}"
    return str(int(x)) if float(x).is_integer() else repr(x)


def to_csv(table: ComparisonTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in table.rows:
        w.writerow([r.node_count, r.variant, r.seed, _fmt(r.baseline_cost),
                    _fmt(r.multilayer_cost), _fmt(r.savings_pct, 4),
                    _fmt(r.baseline_ms, 1), _fmt(r.multilayer_ms, 1)])
    return buf.getvalue()


def to_json(table: ComparisonTable) -> str:
    doc = {"rows": [asdict(r) for r in table.rows], "summary": table.summary}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def to_pretty(table: ComparisonTable) -> str:
    """Node counts down, variants across, cells ``baseline/multilayer`` averaged over seeds."""
    if table.summary.get("status") != "OK":
        return "no data\n"
    variants = list(dict.fromkeys(r.variant for r in table.rows))
    cells: dict[tuple[int, str], list[ComparisonRow]] = {}
    for r in table.rows:
        if r.error is None:
            cells.setdefault((r.node_count, r.variant), []).append(r)
    nodes = sorted({r.node_count for r in table.rows})
    head = ["nodes"] + [str(i + 1) for i in range(len(variants))] + ["savings %"]
    body = []
    for n in nodes:
        line = [str(n)]
        for v in variants:
            rs = cells.get((n, v))
            if not rs:
                line.append("-")
                continue
            b = statistics.fmean(r.baseline_cost for r in rs)
            m = statistics.fmean(r.multilayer_cost for r in rs)
            line.append(f"{b:.0f}/{m:.0f}")
        saved = table.summary["per_node_count"].get(str(n))
        line.append("-" if saved is None else f"{saved:.1f}")
        body.append(line)
    widths = [max(len(row[i]) for row in [head] + body) for i in range(len(head))]
    fmt = "  ".join(f"{{:>{w}}}" for w in widths)
    out = [fmt.format(*head), fmt.format(*("-" * w for w in widths))]
    out += [fmt.format(*row) for row in body]
    out.append("")
    out += [f"{i + 1}: {v}  mean savings {table.summary['per_variant'][v]:.1f}%"
            for i, v in enumerate(variants) if v in table.summary["per_variant"]]
    s = table.summary
    lo, hi = REFERENCE_BAND
    out.append(f"mean savings {s['mean_savings_pct']:.2f}% (min {s['min_savings_pct']:.2f}, "
               f"max {s['max_savings_pct']:.2f}); within {lo:g}-{hi:g}%: "
               f"{'yes' if s['in_reference_band'] else 'no'}")
    return "\n".join(out) + "\n"


_RENDER = {"csv": to_csv, "json": to_json, "pretty": to_pretty}


def emit_report(table: ComparisonTable, fmt: str = "csv", out: str | Path | None = None) -> str:
    """Render ``table`` and write it to ``out`` (a path) when given; returns the text."""
    if fmt not in _RENDER:
        raise ValueError(f"unknown report format {fmt!r}")
    if table.summary.get("status") == "NO_DATA":
        log.warning("comparison table has no usable rows (NO_DATA)")
    text = _RENDER[fmt](table)
    if out is not None:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise MlsynthError(f"cannot write {out}: {exc}", code="IO_ERROR") from exc
    return text


def read_report_csv(path: str | Path) -> list[ComparisonRow]:
    """Rows back from a csv report; savings are recomputed from the cost columns."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            b = float(rec["baseline_cost"]) if rec["baseline_cost"] else None
            m = float(rec["multilayer_cost"]) if rec["multilayer_cost"] else None
            ok = b is not None and m is not None
            rows.append(ComparisonRow(
                int(rec["node_count"]), rec["variant"], int(rec["seed"]), b, m,
                savings_pct(b, m) if ok else None,
                float(rec["baseline_ms"]) if rec["baseline_ms"] else None,
                float(rec["multilayer_ms"]) if rec["multilayer_ms"] else None,
                None if ok else "missing cost"))
    return rows
