import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from rumour.cli import main
from rumour.experiment import ExperimentConfig

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_criteria_powerlaw_a2(capsys):
    code, out, _ = run(["criteria", "--config", str(CONFIGS / "powerlaw_a2.json")], capsys)
    assert code == 0
    assert "firework_homogeneous: Dies" in out


def test_criteria_json_format(capsys):
    code, out, _ = run(["criteria", "--config", str(CONFIGS / "example43_log_harmonic.json"), "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["verdicts"]["reverse_heterogeneous"]["verdict"] == "SurvivesAlmostSurely"


def test_trials_zero_is_config_error(capsys):
    code, _, err = run(["simulate", "--config", str(CONFIGS / "half01.json"), "--trials", "0"], capsys)
    assert code == 1
    assert "config error" in err


def test_unknown_subcommand_is_config_error(capsys):
    code, _, _ = run(["estimate"], capsys)
    assert code == 1


def test_bad_json_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "trials": 10,\n  "horizon": ,\n}\n')
    code, _, err = run(["simulate", "--config", str(bad)], capsys)
    assert code == 1
    assert f"{bad}:3:" in err


def test_unknown_field_in_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"trails": 5}')
    code, _, err = run(["simulate", "--config", str(cfg)], capsys)
    assert code == 1 and "trails" in err


def test_simulate_half_csv(capsys):
    code, out, _ = run(["simulate", "--config", str(CONFIGS / "half01.json")], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    p = float(rows[0]["p_hat"])
    assert abs(p - 0.125) < 0.005
    assert rows[0]["duration_ms"] == ""


def test_simulate_json_echo_round_trips(capsys):
    code, out, _ = run(["simulate", "--config", str(CONFIGS / "half01.json"), "--format", "json",
                        "--trials", "1000"], capsys)
    assert code == 0
    doc = json.loads(out)
    cfg = ExperimentConfig.from_dict(doc["config"])
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    assert cfg.trials == 1000 and cfg.format == "json"


def test_set_overrides(capsys):
    code, out, _ = run(["simulate", "--set", "schedule.kind=\"power_law\"", "--set", "schedule.alpha=2.5",
                        "--set", "horizon=20", "--trials", "500", "--format", "json"], capsys)
    assert code == 0
    cfg = json.loads(out)["config"]
    assert cfg["schedule"]["alpha"] == 2.5 and cfg["horizon"] == 20


def test_bad_set_syntax(capsys):
    code, _, _ = run(["simulate", "--set", "noequals"], capsys)
    assert code == 1


def test_sweep_alpha_rows(capsys):
    code, out, _ = run(["sweep", "--param", "alpha", "--from", "1.2", "--to", "2.6", "--step", "0.2",
                        "--trials", "1000", "--horizon", "100"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    assert [float(r["param_value"]) for r in rows] == pytest.approx([1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6])


def test_sweep_without_grid_is_config_error(capsys):
    code, _, _ = run(["sweep", "--trials", "10"], capsys)
    assert code == 1


def test_sweep_timing(capsys):
    code, out, _ = run(["sweep", "--param", "alpha", "--from", "1.5", "--to", "1.5", "--step", "1",
                        "--trials", "100", "--horizon", "10", "--timing"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and float(rows[0]["duration_ms"]) >= 0


def test_bounds_subcommand(capsys):
    code, out, _ = run(["bounds", "--config", str(CONFIGS / "powerlaw_a2.json")], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["firework"]["lower"]["value"] <= doc["firework"]["upper"]["value"]


def test_trace_output(tmp_path, capsys):
    trace = tmp_path / "trace.jsonl"
    code, _, _ = run(["simulate", "--config", str(CONFIGS / "half01.json"), "--trials", "50",
                      "--trace", str(trace)], capsys)
    assert code == 0
    recs = [json.loads(line) for line in trace.read_text().splitlines()]
    assert {r["trial"] for r in recs} == set(range(10))
    assert all(r["activated"] == [0] for r in recs if r["generation"] == 0)


def test_output_file(tmp_path, capsys):
    out_path = tmp_path / "o.csv"
    code, out, _ = run(["simulate", "--config", str(CONFIGS / "half01.json"), "--trials", "100",
                        "--out", str(out_path)], capsys)
    assert code == 0 and out == ""
    assert out_path.read_text().startswith("process,")


def test_oracle_out(tmp_path, capsys):
    path = tmp_path / "golden.csv"
    code, _, _ = run(["oracle", "--out", str(path)], capsys)
    assert code == 0
    committed = Path(__file__).parent / "golden" / "oracle_golden.csv"
    assert path.read_text() == committed.read_text()


def test_selftest_passes(capsys):
    code, out, err = run(["selftest"], capsys)
    assert code == 0, err
    assert "all checks passed" in out


def test_workers_env_var(monkeypatch, capsys):
    argv = ["simulate", "--config", str(CONFIGS / "half01.json"), "--trials", "20000"]
    monkeypatch.setenv("RUMOUR_SIM_WORKERS", "1")
    _, one, _ = run(argv, capsys)
    monkeypatch.setenv("RUMOUR_SIM_WORKERS", "5")
    _, five, _ = run(argv, capsys)
    assert one == five
    monkeypatch.setenv("RUMOUR_SIM_WORKERS", "zero")
    code, _, _ = run(argv, capsys)
    assert code == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rumour", "criteria", "--config", str(CONFIGS / "half01.json")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "firework_homogeneous" in res.stdout
