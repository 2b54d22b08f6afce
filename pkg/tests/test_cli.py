import json
import re
from pathlib import Path

import pandas as pd
import pytest

from src.constants import MAX_POLYLINE_POINTS, TRAJECTORY_COLUMNS
from src.main import main

BUNDLED = Path(__file__).resolve().parent.parent / "scenarios" / "paper_sec4.json"

@pytest.fixture
def write(scenario_data, tmp_path):
    def factory(name="scenario.json", **overrides) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(scenario_data(**overrides)), encoding="utf-8")
        return str(path)
    return factory

class TestCheck:
    def test_reference_game(self, capsys):
        assert main(["check", str(BUNDLED)]) == 0
        out = capsys.readouterr().out
        assert "condition 2      holds" in out
        assert "t1_bound         6" in out

    def test_tight_capacity_fails(self, write, capsys):
        assert main(["check", write(params={"q1_max": 3.9})]) == 2
        assert "condition 2      fails" in capsys.readouterr().out

    def test_no_surplus_fails(self, write, capsys):
        assert main(["check", write(params={"nu": 3.0})]) == 2
        assert "condition 1      fails" in capsys.readouterr().out

class TestSimulate:
    def test_reference_game(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(["simulate", str(BUNDLED), "--out", str(out_dir), "--svg"]) == 0
        frame = pd.read_csv(out_dir / "paper_sec4.csv")
        assert list(frame.columns) == TRAJECTORY_COLUMNS
        report = json.loads((out_dir / "paper_sec4.report.json").read_text())
        assert report["report"]["verdict"] == "VERIFIED"
        assert report["termination"]["kind"] == "DRAINED"
        assert report["termination"]["t"] == pytest.approx(6.0, abs=2e-3)
        assert frame["t"].iloc[-1] == pytest.approx(6.0, abs=2e-3)
        svg = (out_dir / "paper_sec4.svg").read_text()
        assert svg.count("<polyline") == 2
        for points in re.findall(r'points="([^"]*)"', svg):
            assert 2 <= len(points.split()) <= MAX_POLYLINE_POINTS
        assert "VERIFIED" in capsys.readouterr().out

    def test_drained_start_has_one_row(self, write, tmp_path):
        assert main(["simulate", write(q0={"q1": 0.0, "q2": 0.0}), "--out", str(tmp_path)]) == 0
        frame = pd.read_csv(tmp_path / "run.csv")
        assert len(frame) == 1
        assert frame["t"].iloc[0] == 0.0

    def test_uncontrolled_game_records_overflow(self, write, tmp_path):
        assert main(["simulate", write(defender={"kind": "zero"}), "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "run.report.json").read_text())
        assert report["termination"]["kind"] == "OVERFLOW"
        assert report["report"]["verdict"] == "NOT_APPLICABLE"

    def test_capacity_violation_exits_with_condition_code(self, write, tmp_path):
        assert main(["simulate", write(params={"q1_max": 3.9}), "--out", str(tmp_path)]) == 2
        report = json.loads((tmp_path / "run.report.json").read_text())
        assert report["report"]["verdict"] == "CONDITION_VIOLATED_DEMONSTRATED"

    def test_unavailable_strategy(self, write, tmp_path):
        assert main(["simulate", write(params={"nu": 3.0}), "--out", str(tmp_path)]) == 2

    def test_output_is_deterministic(self, write, tmp_path):
        scenario = write(attacker={"kind": "seeded_random", "seed": 3}, simulation={"dt": 0.01})
        outputs = []
        for _ in range(2):
            assert main(["simulate", scenario, "--out", str(tmp_path), "--seed", "5"]) == 0
            outputs.append(tuple((tmp_path / name).read_bytes() for name in ("run.csv", "run.report.json")))
        assert outputs[0] == outputs[1]

    def test_dt_override(self, tmp_path):
        assert main(["simulate", str(BUNDLED), "--out", str(tmp_path), "--dt", "0.01"]) == 0
        frame = pd.read_csv(tmp_path / "paper_sec4.csv")
        assert frame["t"].iloc[1] == pytest.approx(0.01)

class TestSolve:
    def test_origin(self, write, capsys):
        assert main(["solve", write(q0={"q1": 0.0, "q2": 0.0})]) == 0
        assert "capture time     0" in capsys.readouterr().out

    def test_reference_game(self, write, capsys):
        assert main(["solve", write()]) == 0
        line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("capture time"))
        assert float(line.split()[-1]) >= 2.0

    def test_refuses_without_surplus(self, write):
        assert main(["solve", write(params={"nu": 3.0})]) == 2

class TestCompare:
    def test_writes_comparison(self, write, tmp_path, capsys):
        scenario = write(stochastic={
            "arrival_mean": 0.5, "service_rate": 1.0, "n_runs": 200, "q0": 50, "horizon_slots": 120,
        })
        assert main(["compare", scenario, "--out", str(tmp_path)]) == 0
        frame = pd.read_csv(tmp_path / "run.compare.csv")
        assert list(frame.columns) == ["t", "mean_q", "se_q", "fluid_q", "mean_n", "var_n"]
        assert len(frame) == 121
        summary = json.loads((tmp_path / "run.compare.json").read_text())["summary"]
        assert summary["n_runs"] == 200
        assert summary["variance_slope"] > 0
        assert "runs             200" in capsys.readouterr().out

    def test_zero_randomness(self, write, tmp_path):
        scenario = write(stochastic={"arrival_mean": 0.0, "service_rate": 1.0, "n_runs": 5, "q0": 4, "horizon_slots": 8})
        assert main(["compare", scenario, "--out", str(tmp_path)]) == 0
        frame = pd.read_csv(tmp_path / "run.compare.csv")
        assert (frame["mean_n"] == 0).all() and (frame["var_n"] == 0).all()

    def test_midpoint_alignment(self, write, tmp_path):
        scenario = write(stochastic={
            "arrival_mean": 0.0, "service_rate": 1.0, "n_runs": 5, "q0": 4, "horizon_slots": 8, "alignment": "midpoint",
        })
        assert main(["compare", scenario, "--out", str(tmp_path)]) == 0
        frame = pd.read_csv(tmp_path / "run.compare.csv")
        assert len(frame) == 8
        assert frame["t"].iloc[0] == pytest.approx(0.5)
        assert frame["mean_n"].tolist() == pytest.approx([0.5] * 4 + [0.0] * 4)
        summary = json.loads((tmp_path / "run.compare.json").read_text())["summary"]
        assert summary["alignment"] == "midpoint"

    def test_requires_stochastic_section(self, write, tmp_path):
        assert main(["compare", write(), "--out", str(tmp_path)]) == 1

class TestErrors:
    def test_missing_file(self, tmp_path):
        assert main(["check", str(tmp_path / "nope.json")]) == 1

    def test_invalid_scenario(self, write):
        assert main(["check", write(simulation={"dt": -1.0})]) == 1

    def test_non_utf8_scenario(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_bytes(b'{"name": "\xff\xfe"}')
        assert main(["check", str(path)]) == 1

    def test_unknown_command(self):
        assert main(["explode", str(BUNDLED)]) == 1

    def test_missing_argument(self):
        assert main(["simulate"]) == 1

def test_console_script_targets_main():
    tomllib = pytest.importorskip("tomllib")
    with open(Path(__file__).resolve().parent.parent / "pyproject.toml", "rb") as f:
        project = tomllib.load(f)["project"]
    module, _, attr = project["scripts"]["fluidgame"].partition(":")
    assert (module, attr) == ("src.main", "main")
    assert project["name"] == "fluidgame"
