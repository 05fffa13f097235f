import csv
import io
import json
import os

import pytest

from app.cli import main
from app.domain.service.sim_exec_service import sim_exec_service

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


@pytest.fixture(autouse=True)
def builtin_machine(monkeypatch):
    monkeypatch.delenv("REDIST_MACHINE_FILE", raising=False)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_plan_lists_candidates_at_transition(capsys):
    code, doc = run_json(capsys, ["plan", "--proc", "16x8", "--grid", "9088x568", "--trigger-extent", "10"])
    assert code == 0
    assert doc["transition_grid"] == "1136×71"
    assert [r["proc"] for r in doc["enumeration"]] == ["1×1", "2×1", "4×1", "8×1", "16×1", "16×2", "16×4"]
    assert doc["path"].startswith("16×8") and doc["path"].endswith("1×1")
    assert doc["total"] == pytest.approx(sum(s["cost"] for s in doc["states"]), rel=1e-12)
    assert "wall_time" not in doc["stats"]


def test_plan_is_deterministic(capsys):
    argv = ["plan", "--proc", "16x8", "--grid", "9088x568"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_plan_on_single_rank(capsys):
    code, doc = run_json(capsys, ["plan", "--proc", "1x1", "--grid", "65x65"])
    assert code == 0
    assert doc["message"] == "no redistribution needed"
    assert doc["path"] == "1×1"


def test_plan_table_output(capsys):
    assert main(["plan", "--proc", "4x4", "--grid", "129x129", "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert "redistribution candidates at" in out
    assert "path: 4×4" in out


def test_paths_flags_non_successor(capsys):
    code, doc = run_json(capsys, ["paths", os.path.join(FIXTURES, "paths", "reference_paths.txt"),
                                  "--proc", "64x32", "--local", "568x71"])
    assert code == 1
    assert doc["cheapest"] == "1"
    assert doc["most_expensive"] == "0"
    assert [r["label"] for r in doc["paths"] if not r["valid"]] == ["3"]
    assert sorted(r["rank"] for r in doc["paths"]) == list(range(1, 10))


def test_paths_all_valid(capsys, tmp_path):
    f = tmp_path / "paths.txt"
    f.write_text("a: 64x32 -> 1x1\nb: 64x32 -> 64x16 -> 2x1\n", encoding="utf-8")
    assert main(["paths", str(f), "--proc", "64x32", "--local", "568x71", "--format", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["label"] for r in rows] == ["a", "b"]
    assert rows[1]["path"] == "64×32 → 64×16 → 2×1 → 1×1"


def test_solve_with_simulation(capsys):
    code, doc = run_json(capsys, ["solve", "--grid", "33x33", "--proc", "4x4", "--cycles", "4",
                                  "--simulate", "--plan", "4x4 -> 2x2 -> 1x1"])
    assert code == 0
    assert len(doc["residual_norms"]) == 5
    assert doc["max_factor"] < 1
    sim = doc["simulation"]
    assert sim["procs"] == ["4×4", "4×4", "2×2", "1×1", "1×1"]
    assert sim["max_rel_diff"] == 0.0
    assert sim["reconciled"] is True
    assert sim["messages"] > 0


def test_solve_csv(capsys):
    assert main(["solve", "--grid", "17x17", "--cycles", "3", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "cycle,residual_norm,factor"
    assert len(lines) == 5


def test_unusable_simulation_plan_exits_2(capsys):
    code = main(["solve", "--grid", "9x9", "--proc", "8x8", "--cycles", "2", "--simulate", "--plan", "8x8 -> 1x1"])
    assert code == 2


def test_solve_defaults_to_isotropic_unit_square(capsys):
    code, doc = run_json(capsys, ["solve", "--grid", "17x17", "--cycles", "2"])
    assert code == 0
    assert (doc["r"], doc["aspect"]) == (1.0, None)


def test_compensated_flag_selects_anisotropy(capsys):
    code, doc = run_json(capsys, ["solve", "--grid", "17x17", "--cycles", "2", "--compensated"])
    assert code == 0
    assert (doc["r"], doc["aspect"]) == (16.0, 16.0)
    code, doc = run_json(capsys, ["solve", "--grid", "17x17", "--cycles", "2", "--compensated", "--r", "4"])
    assert (doc["r"], doc["aspect"]) == (4.0, 16.0)


def test_optimal_plan_on_uneven_grid_simulates(capsys):
    code, doc = run_json(capsys, ["solve", "--grid", "100x100", "--proc", "8x8", "--cycles", "2", "--simulate"])
    assert code == 0
    sim = doc["simulation"]
    assert sim["procs"][0] == "8×8"
    assert sim["max_rel_diff"] == 0.0
    assert sim["reconciled"] is True


def test_plan_that_empties_tiles_exits_1(capsys):
    code = main(["solve", "--grid", "257x257", "--proc", "8x8", "--cycles", "1", "--simulate",
                 "--plan", "8x8 -> 8x4 -> 4x4 -> 4x2 -> 1x1"])
    assert code == 1
    assert capsys.readouterr().out == ""


def test_simulation_drift_exits_3(capsys, monkeypatch):
    real = sim_exec_service.simulate

    def drifting(*args, **kwargs):
        x, log, report = real(*args, **kwargs)
        x.values[...] *= 1 + 1e-9
        return x, log, report

    monkeypatch.setattr(sim_exec_service, "simulate", drifting)
    code = main(["solve", "--grid", "33x33", "--proc", "4x4", "--cycles", "2", "--simulate",
                 "--plan", "4x4 -> 2x2 -> 1x1"])
    assert code == 3
    assert capsys.readouterr().out == ""


def test_search_bench_csv(capsys):
    assert main(["search-bench", "--sweep", "wide", "--max-exp", "3", "--format", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [int(r["brute_nodes"]) for r in rows] == [1, 2, 4, 8]
    assert all(int(r["astar_expanded"]) <= int(r["brute_nodes"]) for r in rows)


def test_config_file_overrides_flags(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"grid": [65, 65], "proc": [2, 2]}), encoding="utf-8")
    code, doc = run_json(capsys, ["plan", "--grid", "33x33", "--proc", "4x4", "--config", str(cfg)])
    assert code == 0
    assert (doc["grid"], doc["proc"]) == ("65×65", "2×2")


@pytest.mark.parametrize("argv", [
    ["plan", "--grid", "33x33", "--proc", "2x2x2"],
    ["plan", "--proc", "2x2"],
    ["plan", "--grid", "33x33", "--config", "/nonexistent/run.json"],
    ["plan", "--grid", "33x33", "--machine", "/nonexistent/machine.txt"],
    ["paths", "/nonexistent/paths.txt", "--grid", "33x33"],
    ["solve", "--grid", "33x33", "--proc", "4x4", "--simulate", "--plan", "2x2 -> 1x1"],
])
def test_configuration_errors_exit_1(capsys, argv):
    assert main(argv) == 1
    assert capsys.readouterr().out == ""


def test_bad_config_json(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{grid", encoding="utf-8")
    assert main(["plan", "--grid", "33x33", "--config", str(cfg)]) == 1


def test_output_file(tmp_path, capsys):
    out = tmp_path / "plan.json"
    assert main(["plan", "--grid", "65x65", "--proc", "2x2", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text(encoding="utf-8"))["proc"] == "2×2"
