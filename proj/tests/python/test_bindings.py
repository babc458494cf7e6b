import json
import math

import pytest

import pwdlab


def test_kl_examples():
    p = pwdlab.DistributionSpec.bernoulli([0.75], 0.01)
    q = pwdlab.DistributionSpec.bernoulli([0.25], 0.01)
    assert pwdlab.kl_divergence(p, p) == 0.0
    assert pwdlab.kl_divergence(p, q) == pytest.approx(0.5 * math.log2(3), abs=1e-12)
    g0 = pwdlab.DistributionSpec.gaussian([0.0, 0.0], [1.0, 1.0])
    g1 = pwdlab.DistributionSpec.gaussian([1.0, 0.0], [1.0, 1.0])
    assert pwdlab.kl_divergence(g0, g1) == pytest.approx(1 / (2 * math.log(2)), abs=1e-12)


def test_log_density_and_validation():
    b = pwdlab.DistributionSpec.bernoulli([0.5, 0.5], 0.01)
    assert b.log_density([0.0, 1.0]) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        pwdlab.DistributionSpec.bernoulli([0.001], 0.01)


def test_lab_parameters():
    lp = pwdlab.lab_parameters(0.0, 1.0, 1.0)
    assert lp["a0"] == pytest.approx(0.25)
    assert lp["b0"] == pytest.approx(0.75)
    lp = pwdlab.lab_parameters(0.2, 0.6, 0.4)
    assert 0.6 * lp["a0"] + 0.4 * lp["b0"] == pytest.approx(0.4, abs=1e-15)
    assert not pwdlab.lab_parameters_valid(0.5, 0.5, 0.3)
    eta0, eta1 = pwdlab.noise_rates(0.2, 0.6, 0.2, 0.6, 0.4)
    assert eta0 == pytest.approx(0.4) and eta1 == pytest.approx(0.4)


def test_counts():
    assert pwdlab.guess_grid_size(1.0) == 72
    assert pwdlab.guess_grid_size(0.8) == 110
    assert pwdlab.amplification_repetitions(0.1) == 9
    assert pwdlab.amplification_repetitions(0.25) == 5
    assert pwdlab.ml_selection_sample_size(10.0, 0.1, 0.15, 9) == 26492


def test_run_experiment_is_deterministic(quick_text):
    a = pwdlab.run_experiment(quick_text)
    b = pwdlab.run_experiment(quick_text, workers=2)
    assert a == b
    assert len(a) == 2
    assert all(r["runtime_ms"] is None for r in a)
    assert {r["success"] for r in a} <= {True, False}
    csv = pwdlab.report_csv(quick_text)
    assert csv.splitlines()[0].startswith(pwdlab.report_schema + ",scenario,")
    assert len(csv.splitlines()) == 3


def test_bad_config_names_field(quick_text):
    cfg = json.loads(quick_text)
    cfg["p0"] = {"kind": "explicit", "values": [0.001, 0.5]}
    with pytest.raises(ValueError, match=r"p0\.values\[0\]"):
        pwdlab.run_experiment(json.dumps(cfg))


def test_normalize_round_trip(scenario_dir):
    for path in sorted(scenario_dir.glob("*.json")):
        once = pwdlab.normalize_scenario(path.read_text())
        assert pwdlab.normalize_scenario(once) == once


def test_verify_suite():
    [res] = pwdlab.verify("lab-identity", scale=0.1)
    assert res["name"] == "lab-identity"
    assert res["passed"]
    assert "lab-identity" in pwdlab.suite_names
    with pytest.raises(ValueError):
        pwdlab.verify("nope")
