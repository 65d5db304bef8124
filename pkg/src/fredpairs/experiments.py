"""Batch experiments: criterion landscapes, homotopy checks, model sweeps.

Every experiment returns an :class:`ExperimentReport` (rows plus named
checks). :func:`write_report` emits a CSV table and a JSON sidecar with the
configuration, tolerances and package versions. Output depends only on the
configuration, so identical configs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .acceptance import CRITERIA, run_all
from .blocks import calkin_norm, pair_fredholm
from .criteria import cnorm_criterion, cnorm_witness, graph_criterion, graph_witness
from .errors import ConfigError, InputError
from .geometry import graph_projection
from .homotopy import p_path, w_path
from .linalg import DEFAULT_TOL, Tolerance, op_norm, projection_defect
from .lorentz import ModeSpec, build_model, bvp_fredholm, final_cnorm, final_graph, graph_conditions, tilted_conditions
from .sampling import random_block_pair, random_dense_pair

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "run_sharpness_sweep",
    "run_graph_sweep",
    "run_homotopy_check",
    "run_model_bvp",
    "run_selftest",
    "write_report",
]

EXPERIMENTS = ("sharpness-sweep", "graph-sweep", "homotopy-check", "model-bvp", "selftest")

_DEFAULT_GRID = {
    "sharpness-sweep": 25,
    "graph-sweep": 41,
    "homotopy-check": 101,
    "model-bvp": 21,
    "selftest": 2,
}

DEFAULT_MODE_SPEC = {"n_coupled": 1, "coupling_angles": [0.7853981633974483], "phases": [[0.3, 1.1]],
                     "n_zero_modes": 1}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    grid: int | None = None
    seed: int = 0
    tol: Tolerance = DEFAULT_TOL
    out: str | None = None
    jobs: int = 1
    pairs: int = 10
    mode_spec: dict | None = None
    criteria: tuple | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.grid is None:
            object.__setattr__(self, "grid", _DEFAULT_GRID[self.experiment])
        if not isinstance(self.grid, int) or self.grid < 2:
            raise ConfigError(f"grid resolution must be an integer >= 2, got {self.grid!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.jobs < 1 or self.pairs < 1:
            raise ConfigError("jobs and pairs must be positive")
        if self.criteria is not None:
            crit = tuple(self.criteria)
            if not crit or any(c not in CRITERIA for c in crit):
                raise ConfigError(f"criteria must be a non-empty subset of {sorted(CRITERIA)}")
            object.__setattr__(self, "criteria", crit)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "grid": self.grid,
            "seed": self.seed,
            "tolerance": {"rank_tol": self.tol.rank_tol, "proj_tol": self.tol.proj_tol,
                          "eig_tol": self.tol.eig_tol},
            "out": self.out,
            "jobs": self.jobs,
            "pairs": self.pairs,
            "mode_spec": self.mode_spec,
            "criteria": None if self.criteria is None else list(self.criteria),
        }


@dataclass
class ExperimentReport:
    experiment: str
    columns: list
    rows: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(row.get(c)) for c in report.columns])
    return buf.getvalue()


def _versions() -> dict:
    import scipy

    from . import __version__

    return {"fredpairs": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def write_report(report: ExperimentReport, cfg: ExperimentConfig) -> None:
    """CSV to ``cfg.out`` plus ``<out>.meta.json``; without ``out`` nothing is written."""
    if cfg.out is None:
        return
    path = Path(cfg.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_csv(report))
    meta = {
        "config": cfg.to_dict(),
        "versions": _versions(),
        "rows": len(report.rows),
        "checks": {k: bool(v) for k, v in report.checks.items()},
        "passed": report.passed,
    }
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _pmap(fn, items, jobs: int):
    if jobs == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _require_sane(tol: Tolerance) -> None:
    if not tol.is_sane():
        raise ConfigError(f"tolerances must lie in (0, 1e-3): {tol}")


# sharpness landscape over (||R||_C, ||R'||_C)

def _sharpness_point(args):
    i, j, n, tol = args
    h = Fraction(6, 5 * (n - 1))
    xf, yf = i * h, j * h
    x, y = float(xf), float(yf)
    expected = xf * xf + yf * yf < 1
    row = {"i": i, "j": j, "x": x, "y": y, "expected_fredholm": expected}
    if xf > 1 or yf > 1:
        row.update(criterion_value=x * x + y * y, declared=False, status="infeasible")
        return row
    rep = cnorm_criterion(*cnorm_witness(x, y), tol, oracle=False)
    row.update(criterion_value=rep.criterion_value, declared=rep.declared, status=rep.decision.status.value,
               index=rep.decision.index, predicted_index=rep.predicted_index, consistent=rep.consistent)
    return row


def run_sharpness_sweep(cfg: ExperimentConfig) -> ExperimentReport:
    """Sweep the Calkin-sum criterion over ``[0, 1.2]^2`` using the sharpest configurations.

    Points with a coordinate above 1 are reported as infeasible (two
    projections are never further apart than 1).
    """
    _require_sane(cfg.tol)
    n = cfg.grid
    rows = _pmap(_sharpness_point, [(i, j, n, cfg.tol) for i in range(n) for j in range(n)], cfg.jobs)
    report = ExperimentReport("sharpness-sweep", ["i", "j", "x", "y", "criterion_value", "declared", "status",
                                                  "index", "predicted_index", "expected_fredholm", "consistent"],
                              rows)
    feasible = [r for r in rows if r["status"] != "infeasible"]
    report.checks["boundary_is_unit_circle"] = all(
        (r["status"] == "fredholm") == r["expected_fredholm"] == r["declared"] for r in feasible)
    report.checks["cross_checks"] = all(r.get("consistent", True) for r in feasible)
    report.checks["index_constant"] = len({r["index"] for r in feasible if r["status"] == "fredholm"}) <= 1
    return report


# graph-product landscape over (g0, g1)

def _graph_point(args):
    i, j, n, tol = args
    h = Fraction(2, n - 1)
    g0, g1 = float(i * h), float(j * h)
    rep = graph_criterion(*graph_witness(g0, g1), tol)
    return {"i": i, "j": j, "g0": g0, "g1": g1, "criterion_value": rep.criterion_value,
            "declared": rep.declared, "status": rep.decision.status.value, "index": rep.decision.index,
            "predicted_index": rep.predicted_index, "expected_fredholm": (i * h) * (j * h) < 1,
            "consistent": rep.consistent}


def run_graph_sweep(cfg: ExperimentConfig) -> ExperimentReport:
    """Sweep the graph-product criterion over ``[0, 2]^2`` using the sharpest graph pairs."""
    _require_sane(cfg.tol)
    n = cfg.grid
    rows = _pmap(_graph_point, [(i, j, n, cfg.tol) for i in range(n) for j in range(n)], cfg.jobs)
    report = ExperimentReport("graph-sweep", ["i", "j", "g0", "g1", "criterion_value", "declared", "status",
                                              "index", "predicted_index", "expected_fredholm", "consistent"], rows)
    report.checks["boundary_is_hyperbola"] = all(
        (r["status"] == "fredholm") == r["expected_fredholm"] == r["declared"] for r in rows)
    report.checks["cross_checks"] = all(r["consistent"] for r in rows)
    report.checks["index_constant"] = len({r["index"] for r in rows if r["status"] == "fredholm"}) <= 1
    return report


# homotopy

def _homotopy_pair(args):
    k, seed, n_t, tol = args
    rng = np.random.default_rng([seed, 7, k])
    rows = []
    n = int(rng.integers(1, 9))
    P0, P1 = random_dense_pair(n, 0.95, rng)
    dist = op_norm(P1 - P0)
    for t in np.linspace(0.0, 1.0, n_t):
        W = w_path(P0, P1, t, tol)
        rows.append({"pair": k, "kind": "dense", "t": float(t), "norm_to_start": op_norm(W - P0),
                     "norm_bound": dist, "projection_defect": projection_defect(W)})
    B0, B1 = random_block_pair(rng, max_cycle_dist=0.9)
    cbound = calkin_norm(B1 - B0)
    for t in np.linspace(0.0, 1.0, n_t):
        s = p_path(B0, B1, t, tol)
        d = pair_fredholm(s.projection, B0, tol)
        rows.append({"pair": k, "kind": "block", "t": float(t), "norm_to_start": s.norm_to_start,
                     "calkin_to_start": s.calkin_to_start, "calkin_bound": cbound,
                     "projection_defect": max(projection_defect(b) for b in s.projection.blocks()),
                     "index": d.index})
    return rows


def run_homotopy_check(cfg: ExperimentConfig) -> ExperimentReport:
    """Sample ``W(P0, P1)(t)`` on dense pairs and ``P(t)`` on block pairs."""
    _require_sane(cfg.tol)
    chunks = _pmap(_homotopy_pair, [(k, cfg.seed, cfg.grid, cfg.tol) for k in range(cfg.pairs)], cfg.jobs)
    rows = [r for chunk in chunks for r in chunk]
    report = ExperimentReport("homotopy-check", ["pair", "kind", "t", "norm_to_start", "norm_bound",
                                                 "calkin_to_start", "calkin_bound", "projection_defect", "index"],
                              rows)
    dense = [r for r in rows if r["kind"] == "dense"]
    block = [r for r in rows if r["kind"] == "block"]
    report.checks["projection_axioms"] = all(r["projection_defect"] <= 1e-8 for r in rows)
    report.checks["norm_bound"] = all(r["norm_to_start"] <= r["norm_bound"] + 1e-8 for r in dense)
    report.checks["calkin_bound"] = all(r["calkin_to_start"] <= r["calkin_bound"] + 1e-8 for r in block)
    report.checks["index_constant"] = all(
        len({r["index"] for r in block if r["pair"] == k}) == 1 for k in range(cfg.pairs))
    return report


# toy boundary-value problem

def _model_point(args):
    i, j, n, spec_dict, tol = args
    m = build_model(ModeSpec.from_dict(spec_dict), tol)
    beta0, beta1 = (np.pi / 2) * i / (n - 1), (np.pi / 2) * j / (n - 1)
    P0, P1 = tilted_conditions(m, beta0, beta1)
    rep = final_cnorm(m, P0, P1, tol)
    rows = [{"family": "cnorm", "i": i, "j": j, "p0": beta0, "p1": beta1,
             "criterion_value": rep.criterion_value, "declared": rep.declared,
             "status": rep.decision.status.value, "index": rep.decision.index,
             "predicted_index": rep.predicted_index, "consistent": rep.consistent}]
    g0, g1 = 2.0 * i / (n - 1), 2.0 * j / (n - 1)
    bc0, bc1 = graph_conditions(m, g0, g1)
    rep = final_graph(m, bc0, bc1, tol)
    truth = bvp_fredholm(m, graph_projection(bc0, tol), graph_projection(bc1, tol), tol=tol)
    rows.append({"family": "graph", "i": i, "j": j, "p0": g0, "p1": g1,
                 "criterion_value": rep.criterion_value, "declared": rep.declared,
                 "status": truth.status.value, "index": truth.index, "predicted_index": rep.predicted_index,
                 "consistent": rep.consistent})
    return rows


def run_model_bvp(cfg: ExperimentConfig) -> ExperimentReport:
    """Tilted and graph perturbations of the APS conditions in the toy model."""
    _require_sane(cfg.tol)
    spec_dict = cfg.mode_spec or DEFAULT_MODE_SPEC
    try:
        m = build_model(ModeSpec.from_dict(spec_dict), cfg.tol)
    except InputError as exc:
        raise ConfigError(str(exc)) from exc
    n = cfg.grid
    chunks = _pmap(_model_point, [(i, j, n, spec_dict, cfg.tol) for i in range(n) for j in range(n)], cfg.jobs)
    rows = [r for chunk in chunks for r in chunk]
    report = ExperimentReport("model-bvp", ["family", "i", "j", "p0", "p1", "criterion_value", "declared",
                                            "status", "index", "predicted_index", "consistent"], rows)
    report.checks["criterion_matches_ground_truth"] = all(r["declared"] == (r["status"] == "fredholm") for r in rows)
    report.checks["cross_checks"] = all(r["consistent"] for r in rows)
    report.checks["graph_index_is_aps_index"] = all(
        r["index"] == m.aps_index for r in rows if r["family"] == "graph" and r["status"] == "fredholm")
    return report


def run_selftest(cfg: ExperimentConfig) -> ExperimentReport:
    """Run the acceptance criteria; one row per criterion."""
    results = run_all(cfg.seed, cfg.tol, cfg.criteria)
    rows = [{"criterion": r.number, "title": r.title, "passed": r.passed, "detail": r.detail} for r in results]
    report = ExperimentReport("selftest", ["criterion", "title", "passed", "detail"], rows)
    report.checks = {f"criterion_{r.number}": r.passed for r in results}
    return report


_RUNNERS = {
    "sharpness-sweep": run_sharpness_sweep,
    "graph-sweep": run_graph_sweep,
    "homotopy-check": run_homotopy_check,
    "model-bvp": run_model_bvp,
    "selftest": run_selftest,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    report = _RUNNERS[cfg.experiment](cfg)
    write_report(report, cfg)
    return report
