import json
import os
import pathlib

import pytest

QUICK = {
    "name": "quick",
    "seed": 5,
    "trials": 2,
    "min_success": 0.5,
    "context": {"n": 4},
    "concept": {"kind": "dictator", "variables": [1]},
    "outcome": {"family": "bernoulli-product", "k": 2, "lambda": 0.01},
    "p0": {"kind": "fill", "value": 0.2},
    "p1": {"kind": "fill", "value": 0.8},
    "params": {"epsilon": 0.2, "delta": 0.25, "gamma": 0.1, "xi": 0.4, "m_p": 200,
               "m_cn": 200, "m_sel": 2000, "separate_cap": 10000, "draw_budget": 5000000},
}


@pytest.fixture
def quick_text():
    return json.dumps(QUICK)


@pytest.fixture
def quick_config(tmp_path, quick_text):
    path = tmp_path / "quick.json"
    path.write_text(quick_text)
    return path


@pytest.fixture
def scenario_dir():
    return pathlib.Path(os.environ.get("PWDLAB_SCENARIO_DIR", pathlib.Path(__file__).parents[2] / "scenarios"))
