import pytest

from layoutsat.bench_harness import (CSV_COLUMNS, BenchRecord, Budgets, Method, emit_report,
                                     improvement_pct, load_csv, pipeline_instance, pivot_table,
                                     run_cell, run_suite, validate_pipeline)
from layoutsat.generator import GeneratorSpec, generate
from layoutsat.layout_model import dump_instance

FAST = Budgets(feas_timeout=10, opt_timeout=10)


def rec(**kw):
    base = dict(kind="symmetry", method="CDCL_FEAS", rows=3, cols=3, structure="mixed", rho_hard=0.2,
                rho_soft=0.0, symmetry_mode="none", amo_mode="pairwise", adjacency_mode="forbidden_pairs",
                seed=0, status="SAT", runtime_seconds=1.0)
    return BenchRecord(**{**base, **kw})


def strip_runtime(records):
    return [{**r.__dict__, "runtime_seconds": None} for r in records]


def test_scaling_suite_shape():
    records = run_suite("scaling", [0], FAST)
    assert len(records) == 8
    assert [r.method for r in records[:2]] == ["CDCL_FEAS", "BNB_COLD"]
    assert [(r.rows, r.cols) for r in records[::2]] == [(2, 2), (3, 3), (4, 4), (5, 5)]
    for a, b in zip(records[::2], records[1::2]):
        assert a.status == b.status  # feasibility verdicts agree
    assert all(r.runtime_seconds >= 0 and not r.error for r in records)


def test_suite_is_deterministic_apart_from_runtimes():
    a = run_suite("density", [0, 1], FAST)
    b = run_suite("density", [0, 1], FAST)
    assert strip_runtime(a) == strip_runtime(b)


def test_symmetry_suite_runs_both_modes():
    records = run_suite("symmetry", [0], FAST)
    assert {r.symmetry_mode for r in records} == {"none", "orbit"}
    by_key = {}
    for r in records:
        by_key.setdefault((r.rows, r.method), set()).add(r.status)
    assert all(len(v) == 1 for v in by_key.values())


def test_cells_see_identical_instance_text():
    text = dump_instance(generate(GeneratorSpec(2, 3, "mixed", 0.2, 0.2, 5)))
    cold = run_cell(text, Method.BNB_COLD, kind="optimization", budgets=FAST)
    warm = run_cell(text, Method.BNB_WARM, kind="optimization", budgets=FAST)
    oracle = run_cell(text, Method.ORACLE, kind="optimization", budgets=FAST)
    enum = run_cell(text, Method.ENUM_HYBRID, kind="hybrids", budgets=FAST)
    assert cold.objective == warm.objective == oracle.objective == enum.objective
    assert cold.status == warm.status == oracle.status == enum.status == "OPT"
    assert warm.hint_cost >= warm.objective and warm.conflicts is not None
    assert enum.models_enumerated == oracle.models_enumerated


def test_crash_becomes_unknown_row():
    text = dump_instance(generate(GeneratorSpec(2, 5, "mixed", 0.1, 0.0, 0)))
    r = run_cell(text, Method.ORACLE, kind="scaling")  # 10 slots is over the oracle's limit
    assert r.status == "UNKNOWN" and "InstanceError" in r.error


def test_time_budget_honoured():
    text = dump_instance(generate(GeneratorSpec(6, 6, "mixed", 0.05, 0.05, 0)))
    r = run_cell(text, Method.BNB_COLD, kind="optimization", budgets=Budgets(opt_timeout=0.5))
    assert r.runtime_seconds <= 0.5 + 0.1


def test_csv_round_trip_and_header():
    records = [rec(), rec(method="BNB_COLD", objective=None, runtime_seconds=0.123456789, error="x, y")]
    text = emit_report(records, "csv")
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert "0.123457" in text
    again = load_csv(text)
    assert emit_report(again, "csv") == text
    assert again[1].objective is None and again[1].error == "x, y"


def test_empty_objective_renders_blank():
    row = emit_report([rec(objective=None)], "csv").splitlines()[1].split(",")
    assert row[CSV_COLUMNS.index("objective")] == ""
    md = pivot_table([rec(kind="optimization", method="BNB_COLD", objective=None)])
    assert "| 0 |" not in md.replace("| 0 | ", "")


def test_improvement_formula():
    assert improvement_pct(0.2049, 0.0315) == pytest.approx(84.63, abs=0.01)
    assert improvement_pct(0.000107, 0.000171) == pytest.approx(-59.8, abs=0.05)
    assert improvement_pct(0.0, 1.0) is None


def test_symmetry_pivot():
    records = [rec(runtime_seconds=t) for t in (1.0, 2.0, 3.0)]
    records += [rec(symmetry_mode="orbit", runtime_seconds=t) for t in (0.5, 1.0, 1.5)]
    md = pivot_table(records)
    assert "Improvement %" in md and "| CDCL_FEAS | orbit | 2 | 1 | 50 |" in md


def test_density_pivot_has_one_column_per_rho():
    records = [rec(kind="density", rho_hard=r) for r in (0.05, 0.1, 0.15, 0.25, 0.35)]
    header = pivot_table(records).splitlines()[0]
    assert header.count("rho=") == 5


def test_mixed_kinds_rejected():
    with pytest.raises(ValueError):
        pivot_table([rec(), rec(kind="density")])
    md = emit_report([rec(), rec(kind="density")], "markdown")
    assert "## density" in md and "## symmetry" in md
    with pytest.raises(ValueError):
        emit_report([], "csv")


def test_pipeline_instance_passes():
    report = validate_pipeline()
    assert report.passed, str(report)
    inst = pipeline_instance()
    assert (inst.grid.rows, inst.grid.cols) == (1, 5)
    assert inst.hard_adjacency == {(0, 1)} and inst.hard_separation == {(2, 3)}
    assert {r.method for r in report.records} == {m.value for m in Method}
