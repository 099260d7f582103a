import csv
import json

import pytest

from lexplan.cli import EXIT_ERROR, EXIT_GOAL, EXIT_TIMEOUT, main


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_run_empty_straight(tmp_path):
    assert main(["run", "--scenario", "empty_straight", "--out", str(tmp_path)]) == EXIT_GOAL
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    rows = _rows(tmp_path / "trace.csv")
    assert len(rows) == metrics["ticks_elapsed"] + 1
    assert set(rows[0]) == {"schema_version", "tick", "x", "y", "heading", "kind"}
    assert metrics["replan_count"] == 0
    svg = (tmp_path / "run.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert (tmp_path / "timings.json").exists()


def test_run_blocked_corridor_times_out(tmp_path):
    assert main(["run", "--scenario", "blocked_corridor", "--out", str(tmp_path)]) == EXIT_TIMEOUT
    kinds = {r["kind"] for r in _rows(tmp_path / "trace.csv")}
    assert "hold" in kinds


def test_run_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"reference_path": {"vertices": [[0, 0], [5, 0]]},
                               "robot_start": {"x": 0, "y": 0}, "graph_config": {"d_span": "wide"}}))
    assert main(["run", "--scenario", str(bad), "--out", str(tmp_path / "o")]) == EXIT_ERROR
    assert "graph_config.d_span" in capsys.readouterr().err


def test_run_with_overrides(tmp_path):
    code = main(["run", "--scenario", "empty_straight", "--out", str(tmp_path), "--set", "sim.robot_speed=2.0",
                 "--seed", "4"])
    assert code == EXIT_GOAL
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["ticks_elapsed"] < 198


def test_bad_override_is_a_diagnostic(tmp_path, capsys):
    code = main(["run", "--scenario", "empty_straight", "--out", str(tmp_path), "--set", "graph_config.d_roll=1"])
    assert code == EXIT_ERROR
    assert "graph_config" in capsys.readouterr().err


def test_validate(capsys, tmp_path):
    assert main(["validate", "--scenario", "fig8_pool_dynamic"]) == EXIT_GOAL
    assert "ok" in capsys.readouterr().out
    assert main(["validate", "--scenario", str(tmp_path / "nope.json")]) == EXIT_ERROR


def test_criteria_study(tmp_path, capsys):
    assert main(["criteria-study", "--scenario", "fig4_ushape_static", "--out", str(tmp_path)]) == EXIT_GOAL
    out = capsys.readouterr().out
    assert "risk,heading,distance" in out
    doc = json.loads((tmp_path / "criteria.json").read_text())
    assert [r["hierarchy"] for r in doc["rows"]] == [["distance"], ["heading", "distance"],
                                                     ["risk", "heading", "distance"]]


def test_criteria_study_without_replan_fails_cleanly(capsys):
    assert main(["criteria-study", "--scenario", "empty_straight"]) == EXIT_ERROR
    assert "never triggered a replan" in capsys.readouterr().err


def test_benchmark_small_sweep(tmp_path):
    code = main(["benchmark", "--out", str(tmp_path), "--density", "4,6", "--k-levels", "1,3", "--reps", "1"])
    assert code == EXIT_GOAL
    rows = _rows(tmp_path / "bench.csv")
    assert len(rows) == 4
    assert {r["K"] for r in rows} == {"1", "3"}
    assert all(int(r["node_count"]) > 0 and int(r["edge_count"]) > 0 for r in rows)
    assert (tmp_path / "bench.svg").read_text().startswith("<svg")


@pytest.mark.parametrize("argv", [
    ["benchmark", "--out", "x", "--density", "0"],
    ["benchmark", "--out", "x", "--k-levels", "4"],
    ["run", "--scenario", "empty_straight"],
])
def test_argument_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
