"""Command-line entry point.

Exit status: 0 when every check passes, 1 when a check fails, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, FredpairsError
from .experiments import EXPERIMENTS, ExperimentConfig, report_csv, run_experiment
from .linalg import DEFAULT_TOL, Tolerance

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_FILE_KEYS = {"experiment", "grid", "seed", "tol_rank", "tol_proj", "tol_eig", "out", "jobs", "pairs",
              "mode_spec", "criteria"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fredpairs", description="Fredholm-pair experiments")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="JSON file with default values for any option")
    p.add_argument("--grid", type=int, help="grid resolution (points per axis, >= 2)")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol-rank", type=float)
    p.add_argument("--tol-proj", type=float)
    p.add_argument("--tol-eig", type=float)
    p.add_argument("--pairs", type=int, help="number of random pairs (homotopy-check)")
    p.add_argument("--criteria", type=_int_list, help="comma-separated criterion numbers (selftest)")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--out", help="CSV output path; a .meta.json sidecar is written next to it")
    return p


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from exc


def _load_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _tolerance(experiment: str, rank: float, proj: float, eig: float) -> Tolerance:
    vals = (rank, proj, eig)
    if not all(isinstance(v, (int, float)) and 0.0 < v < 1.0 for v in vals):
        raise ConfigError(f"tolerances must lie in (0, 1): {vals}")
    tol = Tolerance.unchecked(*vals)
    if tol.is_sane():
        return Tolerance(*vals)
    if experiment == "selftest":
        # a bad tolerance should surface as failing criteria, not be rejected
        return tol
    raise ConfigError(f"tolerances must lie in (0, 1e-3): {vals}")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    merged = _load_file(args.config) if args.config else {}
    for key in _FILE_KEYS - {"mode_spec"}:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    if "experiment" not in merged:
        raise ConfigError("no experiment given")
    tol = _tolerance(merged["experiment"], merged.get("tol_rank", DEFAULT_TOL.rank_tol),
                     merged.get("tol_proj", DEFAULT_TOL.proj_tol), merged.get("tol_eig", DEFAULT_TOL.eig_tol))
    return ExperimentConfig(
        experiment=merged["experiment"],
        grid=merged.get("grid"),
        seed=merged.get("seed", 0),
        tol=tol,
        out=merged.get("out"),
        jobs=merged.get("jobs", 1),
        pairs=merged.get("pairs", 10),
        mode_spec=merged.get("mode_spec"),
        criteria=merged.get("criteria"),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FredpairsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if cfg.experiment == "selftest":
        for row in report.rows:
            mark = "PASS" if row["passed"] else "FAIL"
            print(f"[{mark}] {row['criterion']}. {row['title']}: {row['detail']}")
    elif cfg.out is None:
        sys.stdout.write(report_csv(report))
    for name, ok in report.checks.items():
        if not ok:
            print(f"check failed: {name}", file=sys.stderr)
    print(f"{cfg.experiment}: {len(report.rows)} rows, {'pass' if report.passed else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
