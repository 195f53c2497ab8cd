import json
import subprocess
import sys

import pytest

from mlsynth.cli import main, parse_grid
from mlsynth.harness import CSV_COLUMNS
from mlsynth.instance import dumps_instance, instance_to_dict, read_instance
from support import triangle


@pytest.fixture
def tri_file(tmp_path):
    path = tmp_path / "tri.json"
    path.write_text(dumps_instance(triangle()))
    return path


def test_gen_writes_a_readable_instance(tmp_path):
    out = tmp_path / "i.json"
    assert main(["gen", "--nodes", "12", "--variant", "3", "--seed", "4", "--out", str(out)]) == 0
    inst = read_instance(out)
    assert inst.meta == {"node_count": 12, "variant": "sparse-costly-thin", "seed": 4}


@pytest.mark.parametrize("solver,total", [("baseline", 25), ("multilayer", 20), ("exact", 20)])
def test_solve_json(tri_file, capsys, solver, total):
    assert main(["solve", "--in", str(tri_file), "--solver", solver, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["solver"] == solver
    assert doc["cost"]["grand_total"] == total


def test_solve_text_summary(tri_file, capsys):
    assert main(["solve", "--in", str(tri_file)]) == 0
    out = capsys.readouterr().out
    assert "lsr nodes   2/3: A C" in out
    assert "= 20" in out


def test_compare_csv_file(tmp_path):
    out = tmp_path / "r.csv"
    rc = main(["compare", "--grid", "6:8:2", "--variants", "2", "--seeds", "1", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 5


def test_compare_without_rows_warns_and_succeeds(capsys, caplog):
    assert main(["compare", "--grid", "6:6:1", "--variants", "0"]) == 0
    assert capsys.readouterr().out == ",".join(CSV_COLUMNS) + "\n"
    assert "NO_DATA" in caplog.text


def test_parse_grid():
    assert parse_grid("20:50:5") == (20, 25, 30, 35, 40, 45, 50)
    assert parse_grid("7,9") == (7, 9)


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["compare", "--grid", "1:2:0"],
                                  ["compare", "--variants", "12"], ["gen", "--nodes", "x"]])
def test_usage_errors_exit_1(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_invalid_instance_exits_2(tmp_path):
    data = instance_to_dict(triangle())
    data["demands"][0]["dst"] = "A"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["solve", "--in", str(bad)]) == 2


def test_infeasible_generation_and_exact_limits_exit_2(tmp_path):
    assert main(["gen", "--nodes", "2", "--out", str(tmp_path / "x.json")]) == 2
    big = tmp_path / "big.json"
    assert main(["gen", "--nodes", "9", "--out", str(big)]) == 0
    assert main(["solve", "--in", str(big), "--solver", "exact"]) == 2


def test_io_errors_exit_3(tmp_path, tri_file):
    assert main(["solve", "--in", str(tmp_path / "missing.json")]) == 3
    assert main(["gen", "--nodes", "5", "--out", str(tmp_path / "no" / "dir.json")]) == 3
    assert main(["compare", "--grid", "6:6:1", "--variants", "1", "--seeds", "1",
                 "--out", str(tmp_path / "no" / "r.csv")]) == 3


def test_no_data_warning_reaches_stderr():
    proc = subprocess.run([sys.executable, "-m", "mlsynth", "compare", "--grid", "6:6:1",
                           "--variants", "0"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "WARNING" in proc.stderr and "NO_DATA" in proc.stderr


def test_module_entry_point(tri_file):
    proc = subprocess.run([sys.executable, "-m", "mlsynth", "solve", "--in", str(tri_file),
                           "--solver", "baseline"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "= 25" in proc.stdout
