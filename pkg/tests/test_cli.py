import json

import pytest

from telecell.cli import main
from telecell.scenarios import scenario_path

TASK6 = str(scenario_path("task6"))


def run_cli(argv):
    return main(argv)


def test_run_writes_telemetry_and_prints_metrics(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    code = run_cli(["run", "--config", TASK6, "--out", str(out)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["fault"] is None
    assert out.exists()


def test_run_missing_config_names_path(capsys):
    code = run_cli(["run", "--config", "/no/such/file.json"])
    assert code == 2
    assert "/no/such/file.json" in capsys.readouterr().err


def test_run_invalid_override_exits_2(tmp_path, capsys):
    code = run_cli(["run", "--config", TASK6, "--out",
                    str(tmp_path / "x.jsonl"), "--set", "bilateral.c1_kp=-1"])
    assert code == 2
    assert "c1_kp" in capsys.readouterr().err


def test_run_seed_flag_changes_stochastic_channels(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["run", "--config", TASK6, "--set", "channels.drop_probability=0.3",
            "--set", "channels.jitter_steps_max=2"]
    assert run_cli(args + ["--out", str(a), "--seed", "1"]) == 0
    assert run_cli(args + ["--out", str(b), "--seed", "2"]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_replay_verify_identical_file(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    run_cli(["run", "--config", TASK6, "--out", str(out)])
    capsys.readouterr()
    assert run_cli(["replay", "--in", str(out), "--verify"]) == 0


def test_replay_verify_corrupted_line_reports_tick(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    run_cli(["run", "--config", TASK6, "--out", str(out)])
    lines = out.read_text().splitlines()
    bad = json.loads(lines[100])
    bad["arms"][0]["x_m"][0] += 1e-3
    lines[100] = json.dumps(bad)
    out.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert run_cli(["replay", "--in", str(out), "--verify"]) == 4
    err = capsys.readouterr().err
    assert "tick" in err and str(bad["tick"]) in err


def test_replay_schema_mismatch_exits_2(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    run_cli(["run", "--config", TASK6, "--out", str(out)])
    lines = out.read_text().splitlines()
    header = json.loads(lines[0])
    header["schema_version"] = 999
    lines[0] = json.dumps(header)
    out.write_text("\n".join(lines) + "\n")
    assert run_cli(["replay", "--in", str(out), "--verify"]) == 2


def test_sweep_one_axis_three_values(tmp_path, capsys):
    out = tmp_path / "sweep"
    code = run_cli(["sweep", "--config", TASK6,
                    "--axis", "sim.seed=1,2,3", "--out", str(out)])
    assert code == 0
    assert len(list(out.glob("cell_*.jsonl"))) == 3
    assert (out / "summary.csv").read_text().count("\n") == 4
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 3


def test_sweep_invalid_axis_exits_2(tmp_path):
    assert run_cli(["sweep", "--config", TASK6,
                    "--axis", "sim.bogus=1", "--out", str(tmp_path)]) == 2


def test_log_dir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TELECELL_LOG_DIR", str(tmp_path))
    assert run_cli(["run", "--config", TASK6]) == 0
    assert (tmp_path / "run.jsonl").exists()


def test_run_faulting_scenario_exits_3(tmp_path, capsys):
    code = run_cli(["run", "--config", TASK6, "--out", str(tmp_path / "f.jsonl"),
                    "--set", "operator.k_h=1e9"])
    assert code == 3
    assert json.loads(capsys.readouterr().out)["fault"] is not None
