"""End-to-end tests of the command-line interface."""

import csv
import json
import math

import numpy as np
import pytest

from dicke_moments.cli import main, parse_time_grid


def run_cli(tmp_path, *argv):
    out = tmp_path / "out.csv"
    code = main([*argv, "--output", str(out)])
    return code, out


def read_long_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def test_time_grid_parsing():
    np.testing.assert_allclose(parse_time_grid("0:1:3"), [0.0, 0.5, 1.0])
    grid = parse_time_grid("0.01:1:3:log")
    np.testing.assert_allclose(grid, [0.01, 0.1, 1.0])
    with pytest.raises(Exception):
        parse_time_grid("0:1")


def test_simulate_analytic_value(tmp_path):
    code, out = run_cli(
        tmp_path, "simulate", "--n", "1", "--initial", "fully-excited",
        "--t", "0:1:2",
    )
    assert code == 0
    rows = read_long_csv(out)
    hit = [r for r in rows if r["time"] == "1.0" and r["series"] == "p_1"]
    assert len(hit) == 1
    assert float(hit[0]["value"]) == pytest.approx(math.exp(-1), abs=1e-6)


def test_check_trajectory_all_separable(tmp_path):
    code, out = run_cli(
        tmp_path, "check", "--n", "10", "--initial", "fully-excited",
        "--t", "0:10:200",
    )
    assert code == 0
    rows = read_long_csv(out)
    neg = [float(r["value"]) for r in rows if r["series"] == "negativity"]
    assert len(neg) == 200
    assert max(neg) <= 1e-10
    assert all(r["value"] == "1" for r in rows if r["series"] == "valid")


def test_verify_kr_table(tmp_path):
    code, out = run_cli(tmp_path, "verify-kr", "--r", "3", "--kind", "plain")
    assert code == 0
    rows = read_long_csv(out)
    assert rows[0]["expected_K"] == "16.0"
    assert float(rows[0]["relative_error"]) <= 1e-5


def test_reconstruct_output(tmp_path):
    code, out = run_cli(
        tmp_path, "reconstruct", "--n", "7", "--initial", "fully-excited",
        "--t", "0:2:5",
    )
    assert code == 0
    rows = read_long_csv(out)
    residuals = [float(r["value"]) for r in rows if r["series"] == "residual"]
    assert len(residuals) == 5
    assert max(residuals) <= 1e-8


def test_negativity2_and_bipartite(tmp_path):
    code, out = run_cli(
        tmp_path, "negativity2", "--n", "6", "--initial", "dicke:3",
        "--t", "0:1:3",
    )
    assert code == 0
    rows = read_long_csv(out)
    first = [r for r in rows if r["series"] == "negativity2"][0]
    assert float(first["value"]) > 0.0

    code, out = run_cli(
        tmp_path, "bipartite", "--n", "6", "--initial", "fully-excited",
        "--t", "0:1:2", "--partition", "4,2",
    )
    assert code == 0
    rows = read_long_csv(out)
    assert all(float(r["value"]) == 0.0 for r in rows if r["series"] == "neg_4_2")


def test_initial_state_from_file(tmp_path):
    state = tmp_path / "p.json"
    state.write_text(json.dumps([0.25, 0.5, 0.25]))
    code, out = run_cli(
        tmp_path, "simulate", "--n", "2", "--initial", f"file:{state}",
        "--t", "0:1:2",
    )
    assert code == 0


def test_usage_errors_exit_one(tmp_path, capsys):
    assert main(["bogus"]) == 1
    assert main(["simulate", "--n", "2", "--t", "0:1"]) == 1
    assert main(["simulate", "--n", "2", "--t", "0:1:2",
                 "--initial", "dicke:9"]) == 1
    assert main(["simulate", "--n", "2", "--t", "0:1:2",
                 "--initial", "file:/nonexistent.json"]) == 1
    capsys.readouterr()


def test_infeasible_reconstruction_exits_two(tmp_path):
    state = tmp_path / "dicke1.json"
    state.write_text(json.dumps([0.0, 1.0, 0.0]))
    out = tmp_path / "out.csv"
    code = main([
        "reconstruct", "--n", "2", "--initial", f"file:{state}",
        "--t", "0:0.5:2", "--output", str(out),
    ])
    assert code == 2


def test_deterministic_output(tmp_path):
    _, out1 = run_cli(
        tmp_path, "check", "--n", "5", "--initial", "coherent:0.4",
        "--t", "0:2:10",
    )
    first = out1.read_bytes()
    _, out2 = run_cli(
        tmp_path, "check", "--n", "5", "--initial", "coherent:0.4",
        "--t", "0:2:10",
    )
    assert out2.read_bytes() == first


def test_json_sidecar_and_format(tmp_path):
    out = tmp_path / "out.json"
    code = main([
        "simulate", "--n", "2", "--initial", "fully-excited",
        "--t", "0:1:2", "--format", "json", "--output", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["columns"] == ["time", "series", "value"]
    sidecar = json.loads((tmp_path / "out.json.config.json").read_text())
    assert sidecar["N"] == 2
    assert sidecar["command"] == "simulate"
    assert sidecar["time_grid"]["points"] == [0.0, 1.0]


def test_threaded_check_matches_serial(tmp_path, monkeypatch):
    _, serial = run_cli(
        tmp_path, "check", "--n", "6", "--initial", "fully-excited",
        "--t", "0:3:12",
    )
    body = serial.read_bytes()
    monkeypatch.setenv("DICKE_MOMENTS_THREADS", "4")
    _, parallel = run_cli(
        tmp_path, "check", "--n", "6", "--initial", "fully-excited",
        "--t", "0:3:12",
    )
    assert parallel.read_bytes() == body
