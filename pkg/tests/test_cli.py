import csv
import json

import pytest

from fredpairs.cli import main
from fredpairs.errors import ConfigError
from fredpairs.experiments import (
    ExperimentConfig,
    run_graph_sweep,
    run_homotopy_check,
    run_model_bvp,
    run_sharpness_sweep,
)


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_sharpness_sweep_examples():
    # grid step 0.05; (0.6, 0.6) is point (12, 12)
    rep = run_sharpness_sweep(ExperimentConfig("sharpness-sweep", grid=25))
    assert rep.passed
    by_ij = {(r["i"], r["j"]): r for r in rep.rows}
    origin = by_ij[0, 0]
    assert origin["status"] == "fredholm" and origin["index"] == 0
    mid = by_ij[12, 12]
    assert mid["criterion_value"] == pytest.approx(0.72)
    assert mid["status"] == "fredholm" and mid["declared"]
    assert by_ij[24, 0]["status"] == "infeasible"
    assert all("criterion_value" in r and "status" in r for r in rep.rows)


def test_graph_sweep_examples():
    # grid step 0.1 hits (0.5, 1.9) and (1.1, 1.0)
    rep = run_graph_sweep(ExperimentConfig("graph-sweep", grid=21))
    assert rep.passed
    by_ij = {(r["i"], r["j"]): r for r in rep.rows}
    assert by_ij[0, 0]["status"] == "fredholm" and by_ij[0, 0]["index"] == 1
    assert by_ij[5, 19]["status"] == "fredholm" and by_ij[5, 19]["criterion_value"] == pytest.approx(0.95)
    assert by_ij[11, 10]["status"] != "fredholm" and not by_ij[11, 10]["declared"]


def test_homotopy_and_model_experiments():
    assert run_homotopy_check(ExperimentConfig("homotopy-check", grid=11, pairs=3)).passed
    spec = {"n_coupled": 2, "coupling_angles": [0.7, -0.6], "phases": [[0.3, 1.1], [0.0, 2.0]], "n_zero_modes": 2}
    assert run_model_bvp(ExperimentConfig("model-bvp", grid=5, mode_spec=spec)).passed


@pytest.mark.parametrize("kwargs", [dict(grid=1), dict(grid=0), dict(seed=-1), dict(jobs=0), dict(criteria=[])])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig("graph-sweep", **kwargs)


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        ExperimentConfig("plot")


def test_cli_writes_csv_and_metadata(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["--experiment", "graph-sweep", "--grid", "11", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 121
    assert set(rows[0]) >= {"g0", "g1", "criterion_value", "status", "index"}
    meta = json.loads((tmp_path / "sweep.csv.meta.json").read_text())
    assert meta["passed"] and meta["config"]["grid"] == 11
    assert meta["config"]["tolerance"]["rank_tol"] == 1e-9
    assert "numpy" in meta["versions"]


def test_cli_output_is_byte_identical(tmp_path):
    paths = []
    for k, jobs in enumerate(("1", "2")):
        out = tmp_path / f"run{k}" / "h.csv"
        assert main(["--experiment", "homotopy-check", "--grid", "6", "--pairs", "3", "--seed", "5",
                     "--jobs", jobs, "--out", str(out)]) == 0
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_cli_seed_changes_output(tmp_path):
    outs = []
    for seed in ("1", "2"):
        out = tmp_path / f"h{seed}.csv"
        main(["--experiment", "homotopy-check", "--grid", "3", "--pairs", "2", "--seed", seed, "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] != outs[1]


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "m.csv"
    cfg.write_text(json.dumps({"experiment": "model-bvp", "grid": 3, "out": str(out),
                               "mode_spec": {"n_coupled": 0, "coupling_angles": [], "phases": [],
                                             "n_zero_modes": 1}}))
    assert main(["--config", str(cfg)]) == 0
    assert len(_rows(out)) == 18
    # command-line flags override the file
    assert main(["--config", str(cfg), "--grid", "2"]) == 0
    assert len(_rows(out)) == 8


@pytest.mark.parametrize("argv", [
    ["--experiment", "graph-sweep", "--grid", "1"],
    ["--experiment", "sharpness-sweep", "--tol-rank", "0.5"],
    ["--experiment", "graph-sweep", "--tol-proj", "-1"],
    ["--grid", "5"],
    ["--experiment", "selftest", "--criteria", "42"],
])
def test_cli_config_errors(argv, capsys):
    assert main(argv) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_bad_config_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == 2
    bad.write_text(json.dumps({"experiment": "graph-sweep", "colour": "red"}))
    assert main(["--config", str(bad)]) == 2
    bad.write_text(json.dumps({"experiment": "model-bvp", "mode_spec": {"n_coupled": 3}}))
    assert main(["--config", str(bad)]) == 2


def test_selftest_passes_subset(capsys):
    assert main(["--experiment", "selftest", "--criteria", "0,1,5"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3


def test_selftest_corrupted_tolerance_fails(capsys):
    assert main(["--experiment", "selftest", "--criteria", "0,1", "--tol-rank", "0.5"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] 0." in out and "rank" in out
