import json
import os
import subprocess

import pytest

CLI = os.environ.get("PWDLAB_CLI", "pwdlab")


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("PWDLAB_WORKERS", None)
    full_env.update(env or {})
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full_env, timeout=600)


def test_run_writes_csv(quick_config, tmp_path):
    out = tmp_path / "report.csv"
    r = run("run", "--config", str(quick_config), "--out", str(out), "--assert")
    assert r.returncode in (0, 1), r.stderr
    lines = out.read_text().splitlines()
    assert lines[0].startswith("pwdlab_report_v1,")
    assert len(lines) == 3
    assert all(line.startswith("1,quick,") for line in lines[1:])


def test_same_seed_same_bytes(quick_config):
    a = run("forward", "--config", str(quick_config), "--trials", "1", "--seed", "9")
    b = run("forward", "--config", str(quick_config), "--trials", "1", "--seed", "9",
            env={"PWDLAB_WORKERS": "3"})
    assert a.returncode == 0 and b.returncode == 0
    assert a.stdout == b.stdout


def test_events_table(quick_config):
    r = run("events", "--config", str(quick_config))
    assert r.returncode == 0, r.stderr
    lines = r.stdout.splitlines()
    assert lines[0].startswith("event_id")
    assert len(lines) == 5


def test_verify_json(tmp_path):
    out = tmp_path / "verify.json"
    r = run("verify", "logsum", "--seed", "3", "--out", str(out), "--assert")
    assert r.returncode == 0, r.stderr
    doc = json.loads(out.read_text())
    assert doc["seed"] == 3
    assert doc["suites"][0]["name"] == "logsum"
    assert "runtime_ms" not in doc["suites"][0]


@pytest.mark.parametrize("args", [
    ("run",),
    ("run", "--config", "/nonexistent.json"),
    ("run", "--bogus"),
    ("verify", "no-such-suite"),
    ("frobnicate",),
])
def test_usage_errors_exit_2(args):
    assert run(*args).returncode == 2


def test_bad_values_exit_2(quick_config, tmp_path):
    cfg = json.loads(quick_config.read_text())
    cfg["p0"] = {"kind": "explicit", "values": [0.001, 0.5]}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cfg))
    r = run("run", "--config", str(bad))
    assert r.returncode == 2
    assert "p0.values[0]" in r.stderr
    assert run("run", "--config", str(quick_config), env={"PWDLAB_WORKERS": "abc"}).returncode == 2
    bad.write_text("{\n  \"name\": ,\n}")
    r = run("run", "--config", str(bad))
    assert r.returncode == 2 and "line 2" in r.stderr


def test_assert_failure_exits_1(quick_config, tmp_path):
    cfg = json.loads(quick_config.read_text())
    cfg["min_success"] = 1.0
    cfg["params"]["epsilon"] = 1e-9
    strict = tmp_path / "strict.json"
    strict.write_text(json.dumps(cfg))
    r = run("run", "--config", str(strict), "--assert")
    assert r.returncode == 1
    assert run("run", "--config", str(strict)).returncode == 0
