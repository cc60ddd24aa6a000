"""Experiment driver: run every method on the seeded suites and tabulate.

Each (instance, method) cell is run single-threaded against its own copy
of the instance, decoded from the same JSON text, so no method can see
another's side effects.  Records come back in a canonical order, and every
field except ``runtime_seconds`` is a deterministic function of the inputs
as long as no run hits a wall-clock limit.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import logging
import statistics
import time
import traceback
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Iterable, Sequence

from .cnf_encoder import EncodingConfig, SymmetryMode, decode_model, encode_feasibility
from .generator import ExperimentKind, GeneratorSpec, experiment_matrix, generate
from .layout_model import Grid, Instance, dump_instance, instance_from_dict, validate_layout
from .optimizer import (ORACLE_MAX_SLOTS, OptimizeResult, Status, branch_and_bound,
                        brute_force_oracle, deep_enumeration_optimize, warm_start_optimize)
from .sat_core import Solver, SolverConfig

__all__ = [
    "Method",
    "Suite",
    "Budgets",
    "BenchRecord",
    "CSV_COLUMNS",
    "run_suite",
    "run_cell",
    "suite_cells",
    "emit_report",
    "load_csv",
    "pivot_table",
    "improvement_pct",
    "PipelineReport",
    "validate_pipeline",
    "pipeline_instance",
]

log = logging.getLogger(__name__)


class Method(str, enum.Enum):
    CDCL_FEAS = "CDCL_FEAS"
    BNB_COLD = "BNB_COLD"
    BNB_WARM = "BNB_WARM"
    ENUM_HYBRID = "ENUM_HYBRID"
    ORACLE = "ORACLE"


class Suite(str, enum.Enum):
    SCALING = "scaling"
    DENSITY = "density"
    SYMMETRY = "symmetry"
    OPTIMIZATION = "optimization"
    HYBRIDS = "hybrids"


# method list and symmetry modes run by each suite
_SUITE_METHODS = {
    Suite.SCALING: (Method.CDCL_FEAS, Method.BNB_COLD),
    Suite.DENSITY: (Method.CDCL_FEAS, Method.BNB_COLD),
    Suite.SYMMETRY: (Method.CDCL_FEAS, Method.BNB_COLD),
    Suite.OPTIMIZATION: (Method.BNB_COLD, Method.BNB_WARM),
    Suite.HYBRIDS: (Method.ENUM_HYBRID, Method.BNB_WARM),
}
_SUITE_SYMMETRY = {Suite.SYMMETRY: (SymmetryMode.NONE, SymmetryMode.ORBIT)}
_FEASIBILITY_SUITES = {Suite.SCALING, Suite.DENSITY, Suite.SYMMETRY}
_METHOD_RANK = {m: r for r, m in enumerate(Method)}
_SYM_RANK = {m: r for r, m in enumerate(SymmetryMode)}


@dataclass(frozen=True)
class Budgets:
    feas_timeout: float = 10.0
    opt_timeout: float = 60.0
    max_samples: int = 75_000
    node_limit: int | None = None


@dataclass
class BenchRecord:
    kind: str
    method: str
    rows: int
    cols: int
    structure: str
    rho_hard: float
    rho_soft: float
    symmetry_mode: str
    amo_mode: str
    adjacency_mode: str
    seed: int
    status: str
    runtime_seconds: float
    objective: int | None = None
    conflicts: int | None = None
    decisions: int | None = None
    propagations: int | None = None
    restarts: int | None = None
    learned: int | None = None
    nodes_explored: int | None = None
    nodes_pruned: int | None = None
    models_enumerated: int | None = None
    hint_cost: int | None = None
    error: str = ""

    @property
    def key(self) -> tuple:
        return (self.rows, self.cols, self.rho_hard, self.rho_soft, self.seed,
                _SYM_RANK.get(SymmetryMode(self.symmetry_mode), 9),
                _METHOD_RANK.get(Method(self.method), 9))


CSV_COLUMNS = tuple(f.name for f in fields(BenchRecord))
_INT_COLUMNS = {"rows", "cols", "seed", "objective", "conflicts", "decisions", "propagations",
                "restarts", "learned", "nodes_explored", "nodes_pruned", "models_enumerated",
                "hint_cost"}
_FLOAT_COLUMNS = {"rho_hard", "rho_soft", "runtime_seconds"}


# -- running ----------------------------------------------------------------------

def _status_word(status: Status) -> str:
    # the table vocabulary: SAT / UNSAT / OPT / UNKNOWN
    return {Status.OPT: "OPT", Status.FEASIBLE: "SAT",
            Status.INFEASIBLE: "UNSAT", Status.UNKNOWN: "UNKNOWN"}[status]


def _fill_from_result(rec: BenchRecord, res: OptimizeResult) -> None:
    rec.status = _status_word(res.status)
    rec.objective = res.best_objective
    rec.nodes_explored = res.nodes_explored
    rec.nodes_pruned = res.nodes_pruned
    rec.hint_cost = res.hint_cost
    if res.models_enumerated:
        rec.models_enumerated = res.models_enumerated
    _fill_sat_stats(rec, res.sat_stats)


def _fill_sat_stats(rec: BenchRecord, stats: dict) -> None:
    if stats:
        rec.conflicts = stats.get("conflicts")
        rec.decisions = stats.get("decisions")
        rec.propagations = stats.get("propagations")
        rec.restarts = stats.get("restarts")
        rec.learned = stats.get("learned_count")


def _check(instance: Instance, res: OptimizeResult) -> None:
    if res.best_layout is not None and validate_layout(instance, res.best_layout):
        raise AssertionError(f"returned layout violates constraints: {res.best_layout}")


def run_cell(instance_json: str, method: Method | str, *, kind: str,
             symmetry: SymmetryMode | str = SymmetryMode.NONE,
             encoding: EncodingConfig | None = None,
             budgets: Budgets = Budgets(),
             feasibility_only: bool = False) -> BenchRecord:
    """Run one method on one serialized instance.  Never raises."""
    method = Method(method)
    enc = replace(encoding or EncodingConfig(), symmetry_mode=SymmetryMode(symmetry))
    instance = instance_from_dict(json.loads(instance_json))
    meta = instance.meta
    rec = BenchRecord(
        kind=kind, method=method.value, rows=instance.grid.rows, cols=instance.grid.cols,
        structure=str(meta.get("structure", "")), rho_hard=float(meta.get("rho_hard", 0.0)),
        rho_soft=float(meta.get("rho_soft", 0.0)), symmetry_mode=enc.symmetry_mode.value,
        amo_mode=enc.amo_mode.value, adjacency_mode=enc.adjacency_mode.value,
        seed=int(meta.get("seed", 0)), status="UNKNOWN", runtime_seconds=0.0,
    )
    limit = budgets.feas_timeout if feasibility_only else budgets.opt_timeout
    start = time.perf_counter()
    try:
        if method is Method.CDCL_FEAS:
            formula, vm = encode_feasibility(instance, enc)
            left = max(0.0, budgets.feas_timeout - (time.perf_counter() - start))
            solver = Solver(SolverConfig(time_limit=left), formula.n_vars)
            solver.add_clauses(formula.clauses)
            out = solver.solve()
            rec.status = out.status
            _fill_sat_stats(rec, out.stats)
            if out.sat:
                layout = decode_model(out.model, vm, instance)
                if validate_layout(instance, layout):
                    raise AssertionError("decoded SAT model violates constraints")
        elif method is Method.BNB_COLD:
            res = branch_and_bound(instance, time_limit=limit, node_limit=budgets.node_limit,
                                   symmetry=enc.symmetry_mode)
            _check(instance, res)
            _fill_from_result(rec, res)
        elif method is Method.BNB_WARM:
            res = warm_start_optimize(instance, time_limit=limit, feas_time_limit=budgets.feas_timeout,
                                      node_limit=budgets.node_limit, encoding=enc)
            _check(instance, res)
            _fill_from_result(rec, res)
        elif method is Method.ENUM_HYBRID:
            res = deep_enumeration_optimize(instance, budgets.max_samples, time_limit=limit, encoding=enc)
            _check(instance, res)
            _fill_from_result(rec, res)
        else:
            res = brute_force_oracle(instance)
            _fill_from_result(rec, res)
            rec.models_enumerated = res.feasible_count
        if feasibility_only and rec.status == "OPT" and method is not Method.ORACLE:
            rec.status = "SAT"
    except Exception as exc:  # a crash becomes a row, never a hole in the table
        log.error("%s failed on %s: %s", method.value, rec.key[:5], exc)
        log.debug("%s", traceback.format_exc())
        rec.status = "UNKNOWN"
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.runtime_seconds = time.perf_counter() - start
    return rec


def suite_cells(suite: Suite | str, seeds: Iterable[int]) -> list[GeneratorSpec]:
    suite = Suite(suite)
    kind = ExperimentKind.OPTIMIZATION if suite is Suite.HYBRIDS else ExperimentKind(suite.value)
    return experiment_matrix(kind, tuple(seeds))


def run_suite(
    suite: Suite | str,
    seeds: Iterable[int] = range(11),
    budgets: Budgets = Budgets(),
    *,
    methods: Sequence[Method | str] | None = None,
    encoding: EncodingConfig | None = None,
    progress: Callable[[BenchRecord], None] | None = None,
) -> list[BenchRecord]:
    """Generate the suite's instances and run each method on each of them."""
    suite = Suite(suite)
    methods = [Method(m) for m in (methods or _SUITE_METHODS[suite])]
    sym_modes = _SUITE_SYMMETRY.get(suite, ((encoding or EncodingConfig()).symmetry_mode,))
    feas = suite in _FEASIBILITY_SUITES
    records = []
    for spec in suite_cells(suite, seeds):
        text = dump_instance(generate(spec))
        for sym in sym_modes:
            for method in methods:
                if method is Method.ORACLE and spec.rows * spec.cols > ORACLE_MAX_SLOTS:
                    continue
                rec = run_cell(text, method, kind=suite.value, symmetry=sym,
                               encoding=encoding, budgets=budgets, feasibility_only=feas)
                records.append(rec)
                if progress:
                    progress(rec)
    records.sort(key=lambda r: r.key)
    return records


# -- CSV ----------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "%.6g" % value
    return str(value)


def _emit_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def load_csv(text: str) -> list[BenchRecord]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for row in reader:
        vals = {}
        for col, cell in zip(header, row):
            if col in _INT_COLUMNS:
                vals[col] = int(cell) if cell != "" else None
            elif col in _FLOAT_COLUMNS:
                vals[col] = float(cell)
            else:
                vals[col] = cell
        out.append(BenchRecord(**vals))
    return out


# -- Markdown pivots -------------------------------------------------------------------

def improvement_pct(median_no_sym: float, median_sym: float) -> float | None:
    """Speed-up of the symmetry-broken run in percent; negative is a slowdown."""
    if median_no_sym == 0:
        return None
    return 100.0 * (median_no_sym - median_sym) / median_no_sym


def _md_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(_fmt(c) for c in row) + " |" for row in rows]
    return "\n".join(lines)


def _median(values) -> float | None:
    values = list(values)
    return statistics.median(values) if values else None


def _status_summary(recs) -> str:
    counts: dict[str, int] = {}
    for r in recs:
        counts[r.status] = counts.get(r.status, 0) + 1
    return " ".join(f"{s}:{n}" for s, n in sorted(counts.items()))


def _methods_in(records) -> list[str]:
    return sorted({r.method for r in records}, key=lambda m: _METHOD_RANK[Method(m)])


def pivot_table(records: Sequence[BenchRecord]) -> str:
    """One Markdown table in the shape that suits the records' experiment kind."""
    if not records:
        raise ValueError("no records to pivot")
    kinds = {r.kind for r in records}
    if len(kinds) > 1:
        raise ValueError(f"cannot pivot mixed experiment kinds {sorted(kinds)}")
    kind = Suite(kinds.pop())
    methods = _methods_in(records)

    if kind is Suite.SCALING:
        grids = sorted({(r.rows, r.cols) for r in records})
        header = ["Grid"] + [f"{m} {col}" for m in methods for col in ("status", "median s")]
        rows = []
        for g in grids:
            row = [f"{g[0]}x{g[1]}"]
            for m in methods:
                sel = [r for r in records if (r.rows, r.cols) == g and r.method == m]
                row += [_status_summary(sel), _median(r.runtime_seconds for r in sel)]
            rows.append(row)
        return _md_table(header, rows)

    if kind is Suite.DENSITY:
        rhos = sorted({r.rho_hard for r in records})
        header = ["Method"] + [f"rho={_fmt(rho)}" for rho in rhos]
        rows = []
        for m in methods:
            rows.append([m] + [_median(r.runtime_seconds for r in records
                                       if r.method == m and r.rho_hard == rho) for rho in rhos])
        return _md_table(header, rows)

    if kind is Suite.SYMMETRY:
        header = ["Method", "Symmetry", "Median runtime (no symmetry)",
                  "Median runtime (symmetry)", "Improvement %"]
        rows = []
        for m in methods:
            base = _median(r.runtime_seconds for r in records
                           if r.method == m and r.symmetry_mode == SymmetryMode.NONE.value)
            for mode in (SymmetryMode.FIX_FIRST, SymmetryMode.ORBIT):
                sym = _median(r.runtime_seconds for r in records
                              if r.method == m and r.symmetry_mode == mode.value)
                if sym is None:
                    continue
                imp = improvement_pct(base, sym) if base is not None else None
                rows.append([m, mode.value, base, sym, None if imp is None else round(imp, 1)])
        return _md_table(header, rows)

    # optimization / hybrids: one row per instance, method groups side by side
    cols = ("status", "objective", "runtime s", "nodes", "hint cost", "models")
    header = ["Grid", "Seed"] + [f"{m} {c}" for m in methods for c in cols]
    rows = []
    for key in sorted({(r.rows, r.cols, r.seed) for r in records}):
        row = [f"{key[0]}x{key[1]}", key[2]]
        for m in methods:
            sel = [r for r in records if (r.rows, r.cols, r.seed) == key and r.method == m]
            if not sel:
                row += [None] * len(cols)
                continue
            r = sel[0]
            row += [r.status, r.objective, r.runtime_seconds, r.nodes_explored,
                    r.hint_cost, r.models_enumerated]
        rows.append(row)
    return _md_table(header, rows)


def emit_report(records: Sequence[BenchRecord], format: str = "csv") -> str:
    """CSV of all records, or one Markdown pivot per experiment kind."""
    if not records:
        raise ValueError("no records to report")
    if format == "csv":
        return _emit_csv(records)
    if format != "markdown":
        raise ValueError(f"unknown report format {format!r}")
    parts = []
    for kind in sorted({r.kind for r in records}):
        parts.append(f"## {kind}\n\n" + pivot_table([r for r in records if r.kind == kind]))
    return "\n\n".join(parts) + "\n"


# -- pipeline check ------------------------------------------------------------------------

def pipeline_instance() -> Instance:
    """Five machines on a line, one adjacency and one separation constraint."""
    return Instance(Grid(1, 5), 5, hard_adjacency=frozenset({(0, 1)}),
                    hard_separation=frozenset({(2, 3)}),
                    meta={"structure": "mixed", "rho_hard": 0.2, "rho_soft": 0.0, "seed": 0})


@dataclass
class PipelineReport:
    passed: bool
    records: list[BenchRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __str__(self):
        lines = [f"pipeline {'PASS' if self.passed else 'FAIL'}"]
        lines += [f"  {r.method:<12} {r.symmetry_mode:<10} {r.status:<8} {r.error}" for r in self.records]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def validate_pipeline(instance: Instance | None = None, budgets: Budgets = Budgets()) -> PipelineReport:
    """Every method on the same small instance must agree on feasibility.

    ORBIT symmetry breaking has to agree too; FIX_FIRST is only recorded.
    Layouts are checked inside each run, and a failed check shows up as an
    error note on its record.
    """
    inst = instance or pipeline_instance()
    text = dump_instance(inst)
    runs = [(m, SymmetryMode.NONE) for m in Method]
    runs += [(Method.CDCL_FEAS, SymmetryMode.ORBIT), (Method.BNB_COLD, SymmetryMode.ORBIT),
             (Method.CDCL_FEAS, SymmetryMode.FIX_FIRST)]
    recs = [run_cell(text, m, kind="pipeline", symmetry=s, budgets=budgets, feasibility_only=True)
            for m, s in runs]
    verdict = {"SAT": True, "OPT": True, "UNSAT": False}
    required = [r for r in recs if r.symmetry_mode != SymmetryMode.FIX_FIRST.value]
    answers = {verdict.get(r.status) for r in required}
    notes = []
    passed = len(answers) == 1 and None not in answers and not any(r.error for r in recs)
    for r in recs:
        if r.symmetry_mode == SymmetryMode.FIX_FIRST.value and verdict.get(r.status) not in answers:
            notes.append(f"FIX_FIRST changed the status of {r.method} to {r.status}")
    return PipelineReport(passed, recs, notes)
