# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import json

import numpy as np
import pandas as pd
import pytest

from main import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main
from src.config.loader import clear_config_cache
from src.trajopt import integrate
from src.utils.output import sidecar_path

SMALL_TIRE = (
    "tire:\n"
    "  kappa: {start: -0.2, stop: 0.2, num: 21}\n"
    "  beta: {start: -0.2, stop: 0.2, num: 21}\n"
    "  loads: [4000]\n"
)


@pytest.fixture(autouse=True)
def isolated(monkeypatch):
    clear_config_cache()
    monkeypatch.delenv("LTCAR_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("LTCAR_THREADS", raising=False)
    yield
    clear_config_cache()


def _config(tmp_path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _run(command, config, out, *extra) -> int:
    return main([command, "--config", config, "--output-dir", str(out), *extra])


def test_tire_outputs(tmp_path, capsys):
    """Test the tire command files and their sidecars"""
    config = _config(tmp_path, "tire.yaml", SMALL_TIRE)
    out = tmp_path / "out"
    assert _run("tire", config, out) == EXIT_OK
    names = ["tire_longitudinal.csv", "tire_lateral.csv", "tire_envelope.csv"]
    for name in names:
        assert (out / name).exists()
        meta = json.loads(sidecar_path(out / name).read_text())
        assert meta["command"] == "tire"
        assert meta["tire_mode"] == "pacejka"
    printed = capsys.readouterr().out.split()
    assert printed == [str(out / name) for name in names]
    lateral = pd.read_csv(out / "tire_lateral.csv")
    assert set(lateral["axle"]) == {"front", "rear"}
    assert len(lateral) == 2 * 21
    zero = lateral[lateral["beta"].abs() < 1e-12]
    assert len(zero) == 2
    np.testing.assert_allclose(zero["fy"], 0.0, atol=1e-9)


def test_reruns_are_byte_identical(tmp_path):
    """Test deterministic outputs for one configuration"""
    config = _config(tmp_path, "tire.yaml", SMALL_TIRE)
    assert _run("tire", config, tmp_path / "a") == EXIT_OK
    assert _run("tire", config, tmp_path / "b") == EXIT_OK
    for name in ("tire_envelope.csv", "tire_envelope.csv.meta.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_output_conflict_and_force(tmp_path):
    """Test that another configuration needs --force to overwrite"""
    out = tmp_path / "out"
    first = _config(tmp_path, "first.yaml", SMALL_TIRE)
    second = _config(tmp_path, "second.yaml", SMALL_TIRE.replace("4000", "5000"))
    assert _run("tire", first, out) == EXIT_OK
    assert _run("tire", second, out) == EXIT_IO
    assert _run("tire", second, out, "--force") == EXIT_OK
    lateral = pd.read_csv(out / "tire_lateral.csv")
    assert set(lateral["fz"]) == {5000.0}


def test_invalid_config_exit_code(tmp_path, capsys):
    """Test that a configuration error exits with its own code"""
    config = _config(tmp_path, "bad.yaml", "solver:\n  dt: -0.1\n")
    assert _run("tire", config, tmp_path / "out") == EXIT_CONFIG
    assert "Error" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize(
    "text", ["tire:\n  loads: [4000\n", "just a string\n"], ids=["unclosed", "scalar"]
)
def test_malformed_yaml_exit_code(tmp_path, capsys, text):
    """Test that unreadable YAML exits with the configuration code"""
    config = _config(tmp_path, "broken.yaml", text)
    assert _run("tire", config, tmp_path / "out") == EXIT_CONFIG
    assert "Error" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_equilibria_command(tmp_path):
    """Test branch files and the summary of a short trace"""
    config = _config(tmp_path, "eq.yaml", "solver:\n  max_points: 40\n")
    out = tmp_path / "out"
    assert _run("equilibria", config, out, "--speeds", "30", "--threads", "1") == EXIT_OK
    frame = pd.read_csv(out / "branch_v30.csv")
    assert len(frame) == 40
    assert frame["residual_norm"].max() <= 1e-8
    summary = json.loads((out / "equilibria_summary.json").read_text())
    (branch,) = summary["branches"]
    assert branch["file"] == "branch_v30.csv"
    assert branch["stop_reason"] == "max_points"
    assert summary["model"]["kind"] == "ltcar"


def test_simulate_command(tmp_path):
    """Test a simulation held at a cornering equilibrium"""
    config = _config(
        tmp_path,
        "sim.yaml",
        "simulate:\n  equilibrium: {v: 20, a_lat: 4}\n  duration: 1.0\n  drive: rear\n",
    )
    out = tmp_path / "out"
    assert _run("simulate", config, out, "--dt", "0.01") == EXIT_OK
    frame = pd.read_csv(out / "simulate_trajectory.csv")
    assert len(frame) == 101
    np.testing.assert_allclose(frame["psidot"], 0.2, atol=1e-5)
    np.testing.assert_allclose(frame["a_lat"], 4.0, rtol=1e-3)


def test_numerical_failure_exit_code(tmp_path):
    """Test that a model failure exits with the numerical code"""
    config = _config(
        tmp_path, "slow.yaml", "simulate:\n  initial_state: {vx: 0.4}\n  duration: 0.1\n"
    )
    assert _run("simulate", config, tmp_path / "out") == EXIT_NUMERIC


def test_explore_external_curve(tmp_path, car):
    """Test exploration of a supplied trajectory with the light input weight"""
    x0 = np.array([0.0, 0.0, 0.0, 20.0, 0.0, 0.0])
    coast = integrate(x0, np.zeros((26, 3)), car, 0.02)
    curve_file = tmp_path / "coast.csv"
    coast.to_frame().to_csv(curve_file, index=False)
    config = _config(
        tmp_path,
        "explore.yaml",
        f"explore:\n  external_curve: {curve_file}\nsolver:\n  dt: 0.02\n",
    )
    out = tmp_path / "out"
    assert _run("explore", config, out) == EXIT_OK
    summary = json.loads((out / "explore_summary.json").read_text())
    assert summary["kind"] == "single"
    assert np.diag(summary["weights"]["R"]).tolist() == [1e-3, 1e-3, 1e-3]
    (leg,) = summary["legs"]
    assert leg["status"] == "converged"
    assert leg["final_cost"] == pytest.approx(0.0, abs=1e-12)
    optimal = pd.read_csv(out / "explore_leg00_optimal.csv")
    np.testing.assert_allclose(optimal["x"], coast.states[:, 0], atol=1e-9)
    iterates = (out / "explore_leg00_iterates.jsonl").read_text().splitlines()
    assert json.loads(iterates[0])["iter"] == 0
    comparison = pd.read_csv(out / "explore_comparison.csv")
    assert {"x_desired", "x_optimal"} <= set(comparison.columns)
