import pytest

from mlsynth import harness
from mlsynth.errors import MlsynthError, NoData
from mlsynth.harness import (
    CSV_COLUMNS,
    DEFAULT_NODE_COUNTS,
    ComparisonRow,
    ComparisonTable,
    SuiteConfig,
    compare_instance,
    emit_report,
    read_report_csv,
    run_comparison,
    summarize,
    summarize_savings,
    to_csv,
    worker_count,
)
from mlsynth.instance import DEFAULT_VARIANTS, generate_instance


def table_of(savings):
    rows = [ComparisonRow(20, "v", i, 100.0, 100.0 - s, s) for i, s in enumerate(savings)]
    return ComparisonTable(tuple(rows), summarize(rows))


def grid_table():
    rows = [ComparisonRow(n, v, 0, 200, 180, 10.0)
            for n in DEFAULT_NODE_COUNTS for v in DEFAULT_VARIANTS]
    return ComparisonTable(tuple(rows), summarize(rows))


def test_full_grid_table_has_57_csv_lines():
    text = to_csv(grid_table())
    lines = text.splitlines()
    assert len(lines) == 57
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "20,sparse-cheap-thin,0,200,180,10.0000,,"


def test_emitting_twice_gives_identical_bytes(tmp_path):
    t = grid_table()
    emit_report(t, "csv", tmp_path / "a.csv")
    emit_report(t, "csv", tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize("savings,mean,band", [([12, 14], 13, True), ([0, 0], 0, False)])
def test_savings_summary(savings, mean, band):
    s = summarize_savings(table_of(savings))
    assert s.mean == pytest.approx(mean)
    assert s.in_reference_band is band


def test_empty_table_is_no_data(caplog):
    t = ComparisonTable((), summarize([]))
    assert t.summary["status"] == "NO_DATA"
    with pytest.raises(NoData):
        summarize_savings(t)
    assert emit_report(t, "csv") == ",".join(CSV_COLUMNS) + "\n"
    assert "NO_DATA" in caplog.text
    assert emit_report(t, "pretty") == "no data\n"


def test_failed_rows_are_counted_not_averaged():
    rows = [ComparisonRow(20, "v", 0, 100, 90, 10.0),
            ComparisonRow(20, "v", 1, None, None, None, error="boom")]
    s = summarize(rows)
    assert (s["rows"], s["errors"], s["mean_savings_pct"]) == (2, 1, 10.0)


def test_worked_triangle_row_saves_20_percent():
    row = compare_instance(generate_instance(3, "worked-triangle", 0))
    assert (row.baseline_cost, row.multilayer_cost, row.savings_pct) == (25, 20, 20.0)
    assert row.baseline_ms is None


def test_timing_fills_runtime_columns():
    row = compare_instance(generate_instance(3, "worked-triangle", 0), timing=True)
    assert row.baseline_ms is not None and row.multilayer_ms is not None


def test_grid_run_yields_56_ordered_rows(monkeypatch):
    def fake(instance, builder, search, timing, verify):
        m = instance.meta
        return ComparisonRow(m["node_count"], m["variant"], m["seed"], 10, 9, 10.0)

    monkeypatch.setattr(harness, "compare_instance", fake)
    config = SuiteConfig(node_counts=DEFAULT_NODE_COUNTS[::-1], seeds=(0,), workers=1)
    t = run_comparison(config)
    assert len(t.rows) == 56
    keys = [(r.node_count, DEFAULT_VARIANTS.index(r.variant)) for r in t.rows]
    assert keys == sorted(keys)


def test_generation_errors_are_recorded_per_row():
    t = run_comparison(SuiteConfig(node_counts=(2, 3), variants=("worked-triangle",), seeds=(0,),
                                   workers=1))
    assert [r.error is None for r in t.rows] == [False, True]
    assert "PARAMS_INFEASIBLE" in t.rows[0].error


def test_summary_recomputes_from_emitted_csv(tmp_path):
    config = SuiteConfig(node_counts=(8, 10), variants=DEFAULT_VARIANTS[:3], seeds=(0, 1),
                         workers=1, verify=True)
    t = run_comparison(config)
    assert all(r.violations == 0 for r in t.rows)
    emit_report(t, "csv", tmp_path / "r.csv")
    assert summarize(read_report_csv(tmp_path / "r.csv")) == t.summary
    assert all(r.savings_pct >= 0 for r in t.rows)


def test_pretty_and_json_reports():
    t = grid_table()
    pretty = emit_report(t, "pretty")
    assert "200/180" in pretty and "within 10-16%: yes" in pretty
    assert '"mean_savings_pct": 10.0' in emit_report(t, "json")
    with pytest.raises(ValueError):
        emit_report(t, "xml")


def test_unwritable_report_is_an_io_error(tmp_path):
    with pytest.raises(MlsynthError) as exc:
        emit_report(grid_table(), "csv", tmp_path / "missing" / "r.csv")
    assert exc.value.code == "IO_ERROR"


def test_thread_cap_from_environment(monkeypatch):
    monkeypatch.setenv("MLSYNTH_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.delenv("MLSYNTH_THREADS")
    assert worker_count(3) == 3
