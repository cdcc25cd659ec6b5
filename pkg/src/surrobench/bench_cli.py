"""Experiment driver and ``bench`` command line entry point.

Four experiment families share one JSON config format:

  E1_activations    train the network surrogate per activation and profile
                    the epochs needed to reach each convergence level,
                    on both training and testing losses
  E2_bases          fit the twelve interpolation/regression/RBF columns on
                    one shared sample set per problem and record the
                    value/gradient/Hessian errors at the start point
  E3_nn_approx      train the network surrogate per activation and record
                    the same three errors at the start point
  E4_fle_vs_fles    run the full-low evaluation solver and its five
                    surrogate-gradient variants under a shared budget and
                    profile the evaluations needed per convergence level

Every cell (problem x solver x seed) derives its random state from the
cell coordinates alone, so running any subset of cells reproduces exactly
the rows the full run would produce. All CSV floats are written with repr
and reread with float, which round-trips exactly; a manifest.json in the
output directory holds the normalized config and suffices to reproduce
the CSVs byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
import zlib
from dataclasses import dataclass, fields as dc_fields
from hashlib import sha256
from pathlib import Path

import numpy as np

from . import __version__
from . import nn_surrogate as nn
from .activations import ACTIVATION_KINDS, Activation
from .metrics import (
    approx_errors,
    evals_to_tau,
    iterations_to_tau,
    performance_profile,
)
from .optimizer import FleConfig, run
from .poly_surrogate import (
    Basis,
    HAT_DIAGONAL,
    NATURAL,
    PoisednessError,
    TILDE_CROSS,
    fit_interpolation,
    fit_rbf,
    fit_regression,
)
from .problems import PROBLEM_SETS, SET38, SET53, SYNTHETIC, catalog
from .sampling import SampleSet, sample_ball, standard_sizes

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXPERIMENTS = ("E1_activations", "E2_bases", "E3_nn_approx",
               "E4_fle_vs_fles")

# the twelve x-axis columns of the basis comparison, in figure order:
# the natural basis, the cross-term basis per activation, the diagonal
# basis per activation, and Gaussian RBF interpolation
E2_COLUMNS = (
    [("1", NATURAL, None)]
    + [(str(2 + i), TILDE_CROSS, a) for i, a in enumerate(ACTIVATION_KINDS)]
    + [(str(7 + i), HAT_DIAGONAL, a) for i, a in enumerate(ACTIVATION_KINDS)]
    + [("12", "rbf", None)]
)

E4_SOLVERS = (
    ("FLE", "none"),
    ("FLE-S-natural", "natural"),
    ("FLE-S-hat_sigmoid", "hat_sigmoid"),
    ("FLE-S-rbf_gaussian", "rbf_gaussian"),
    ("FLE-S-nn_relu", "nn_relu"),
    ("FLE-S-nn_silu", "nn_silu"),
)

_TRAIN_KEYS = {f.name for f in dc_fields(nn.TrainConfig)} - {"seed"}
_FLE_KEYS = {f.name for f in dc_fields(FleConfig)} - {"surrogate"}


class ConfigError(ValueError):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    problem_set: str
    out_dir: str
    dims: tuple = ()
    taus: tuple = (1e-2, 1e-5)
    seeds: tuple = (0, 1, 2, 3, 4)
    problems: tuple | None = None
    solvers: tuple | None = None
    train: dict | None = None
    fle: dict | None = None

    def to_dict(self) -> dict:
        """The canonical form: normalize_config is its identity."""
        out = {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "problem_set": self.problem_set,
            "dims": list(self.dims),
            "taus": list(self.taus),
            "seeds": list(self.seeds),
            "out_dir": self.out_dir,
        }
        if self.problems is not None:
            out["problems"] = list(self.problems)
        if self.solvers is not None:
            out["solvers"] = list(self.solvers)
        if self.train:
            out["train"] = dict(self.train)
        if self.fle:
            out["fle"] = dict(self.fle)
        return out


def _default_seeds(experiment: str) -> tuple:
    # the optimizer comparison runs once per problem; training-based
    # experiments repeat five times as the network init is random
    return (0,) if experiment == "E4_fle_vs_fles" else (0, 1, 2, 3, 4)


def normalize_config(raw: dict) -> dict:
    """Validate a raw config dict and return its canonical form."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"schema_version", "experiment", "problem_set", "dims", "taus",
             "seeds", "problems", "solvers", "out_dir", "train", "fle"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}", key)
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {SCHEMA_VERSION}", "schema_version")
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {', '.join(EXPERIMENTS)}",
            "experiment")
    pset = raw.get("problem_set")
    if pset not in PROBLEM_SETS:
        raise ConfigError(
            f"problem_set must be one of {', '.join(PROBLEM_SETS)}",
            "problem_set")

    dims = raw.get("dims")
    if pset == SET53:
        if dims:
            raise ConfigError(f"dims is not applicable to {SET53}", "dims")
        dims = []
    else:
        if not dims:
            raise ConfigError(f"dims is required for {pset}", "dims")
        if not all(isinstance(d, int) and d >= 1 for d in dims):
            raise ConfigError("dims must be positive integers", "dims")
        dims = [int(d) for d in dims]

    taus = raw.get("taus", [1e-2, 1e-5])
    taus = [float(t) for t in taus]
    if not taus or not all(0.0 < t <= 1.0 for t in taus):
        raise ConfigError("taus must be a non-empty list in (0, 1]", "taus")

    seeds = raw.get("seeds", list(_default_seeds(exp)))
    if not seeds or not all(isinstance(s, int) and s >= 0 for s in seeds):
        raise ConfigError(
            "seeds must be a non-empty list of non-negative integers",
            "seeds")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds must be distinct", "seeds")

    out_dir = raw.get("out_dir")
    if not out_dir or not isinstance(out_dir, str):
        raise ConfigError("out_dir is required", "out_dir")

    problems = raw.get("problems")
    if problems is not None:
        names = {p.name for d in (dims or [None])
                 for p in catalog(pset, d)}
        unknown = [p for p in problems if p not in names]
        if unknown:
            raise ConfigError(
                f"unknown problems for {pset}: {', '.join(unknown)}",
                "problems")
        problems = list(problems)

    solvers = raw.get("solvers")
    if solvers is not None:
        if exp != "E4_fle_vs_fles":
            raise ConfigError(
                "solvers only applies to E4_fle_vs_fles", "solvers")
        labels = [label for label, _ in E4_SOLVERS]
        unknown = [s for s in solvers if s not in labels]
        if unknown:
            raise ConfigError(
                f"unknown solvers: {', '.join(unknown)}", "solvers")
        if not solvers:
            raise ConfigError("solvers must not be empty", "solvers")
        solvers = list(solvers)

    train = dict(raw.get("train") or {})
    bad = set(train) - _TRAIN_KEYS
    if bad:
        raise ConfigError(
            f"unknown or reserved train keys: {', '.join(sorted(bad))}",
            "train")
    fle = dict(raw.get("fle") or {})
    bad = set(fle) - _FLE_KEYS
    if bad:
        raise ConfigError(
            f"unknown or reserved fle keys: {', '.join(sorted(bad))}",
            "fle")

    out = {
        "schema_version": SCHEMA_VERSION,
        "experiment": exp,
        "problem_set": pset,
        "dims": dims,
        "taus": taus,
        "seeds": [int(s) for s in seeds],
        "out_dir": out_dir,
    }
    if problems is not None:
        out["problems"] = problems
    if solvers is not None:
        out["solvers"] = solvers
    if train:
        out["train"] = {k: train[k] for k in sorted(train)}
    if fle:
        out["fle"] = {k: fle[k] for k in sorted(fle)}
    return out


def config_from_dict(norm: dict) -> ExperimentConfig:
    return ExperimentConfig(
        experiment=norm["experiment"],
        problem_set=norm["problem_set"],
        out_dir=norm["out_dir"],
        dims=tuple(norm["dims"]),
        taus=tuple(norm["taus"]),
        seeds=tuple(norm["seeds"]),
        problems=tuple(norm["problems"]) if "problems" in norm else None,
        solvers=tuple(norm["solvers"]) if "solvers" in norm else None,
        train=norm.get("train"),
        fle=norm.get("fle"),
    )


def validate_config(path,
                    out_override: str | None = None) -> ExperimentConfig:
    """Load a config file (or a manifest wrapping one) and validate it."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}")
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}")
    if isinstance(raw, dict) and "config" in raw and "experiment" not in raw:
        raw = raw["config"]
    if out_override is not None:
        raw = dict(raw)
        raw["out_dir"] = out_override
    return config_from_dict(normalize_config(raw))


def config_hash(norm: dict) -> str:
    # the output location does not affect the results
    payload = {k: v for k, v in norm.items() if k != "out_dir"}
    return sha256(
        json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _cell_entropy(*parts) -> list[int]:
    """Deterministic integer entropy from problem names and indices."""
    out = []
    for p in parts:
        out.append(zlib.crc32(p.encode()) if isinstance(p, str) else int(p))
    return out


def _instances(cfg: ExperimentConfig):
    probs = []
    for d in cfg.dims or [None]:
        probs.extend(catalog(cfg.problem_set, d))
    if cfg.problems is not None:
        probs = [p for p in probs if p.name in cfg.problems]
    return probs


def _raw_points(problem, rep: int, channel: int, count: int) -> np.ndarray:
    """The shared uniform-ball draw for a (problem, seed) cell."""
    ss = np.random.SeedSequence(
        _cell_entropy(problem.name, problem.dim, rep, channel))
    return sample_ball(problem.x0, 1.0, count, ss)


def _nn_datasets(problem, rep: int):
    """Training set {x0} + random ball points, plus a fresh testing set.

    The random training points are the same draw the basis experiment
    uses, so both surrogate families see identical data per cell.
    """
    n_train, n_test = standard_sizes(problem.dim)
    raw = _raw_points(problem, rep, 0, n_train)
    Xtr = np.vstack([problem.x0, raw[: n_train - 1]])
    Xte = _raw_points(problem, rep, 1, n_test)
    ytr = np.array([problem.evaluate(x) for x in Xtr])
    yte = np.array([problem.evaluate(x) for x in Xte])
    return Xtr, ytr, Xte, yte


def _batch_size(cfg: ExperimentConfig, problem) -> int:
    if cfg.train and "batch_size" in cfg.train:
        return int(cfg.train["batch_size"])
    if cfg.problem_set == SET38:
        return nn.minibatch_size(SET38, problem.dim)
    n_train, _ = standard_sizes(problem.dim)
    return nn.minibatch_size(SET53, n_train)


def _train_config(cfg: ExperimentConfig, problem, rep: int) -> nn.TrainConfig:
    overrides = dict(cfg.train or {})
    overrides["batch_size"] = _batch_size(cfg, problem)
    return nn.TrainConfig(seed=rep, **overrides)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _profile_rows(table, labels):
    rows = []
    for curve in performance_profile(table, labels):
        for a, r in zip(curve.alphas, curve.rhos):
            rows.append([curve.label, repr(float(a)), repr(float(r))])
    return rows


def _tau_tag(tau: float) -> str:
    return f"{tau:.0e}"


def _median_or_fail(values):
    """Median over cells where None marks a failed cell; nan when the
    median itself is unreached (at least half the cells failed)."""
    arr = np.array([np.inf if v is None else float(v) for v in values])
    med = float(np.median(arr))
    return med if np.isfinite(med) else np.nan


# --- E1: activation comparison on training curves ---------------------------

def _run_e1(cfg: ExperimentConfig, out: Path) -> None:
    trace_rows, iter_rows = [], []
    cells = {}
    for problem in _instances(cfg):
        for rep in cfg.seeds:
            Xtr, ytr, Xte, yte = _nn_datasets(problem, rep)
            tcfg = _train_config(cfg, problem, rep)
            for act in ACTIVATION_KINDS:
                mcfg = nn.MlpConfig(problem.dim, Activation(act))
                _, trace = nn.train(mcfg, (Xtr, ytr), (Xte, yte), tcfg)
                cells[(problem.name, problem.dim, rep, act)] = trace
                trace_rows.append([problem.name, problem.dim, act, rep, 0,
                                   repr(trace.initial_train_loss),
                                   repr(trace.initial_test_loss), ""])
                for ep, (a, b, c) in enumerate(
                    zip(trace.train_loss, trace.test_loss, trace.lr), 1
                ):
                    trace_rows.append([problem.name, problem.dim, act, rep,
                                       ep, repr(a), repr(b), repr(c)])
    _write_csv(out / "traces.csv",
               ["problem", "n", "activation", "seed", "epoch", "train_loss",
                "test_loss", "lr"], trace_rows)

    counts = _e1_counts(cfg, cells, iter_rows)
    _write_csv(out / "iterations.csv",
               ["problem", "n", "activation", "seed", "dataset", "tau",
                "iterations"], iter_rows)
    _write_e1_profiles(cfg, counts, out)


def _e1_counts(cfg: ExperimentConfig, cells: dict, iter_rows: list) -> dict:
    """Per-cell epoch counts; the reference loss is the lowest any
    activation reached on that problem and seed."""
    counts = {}
    keys = sorted({(p, n, r) for p, n, r, _ in cells},
                  key=lambda k: [str(k[0]), k[1], k[2]])
    for p, n, rep in keys:
        for ds in ("train", "test"):
            traces = {}
            for act in ACTIVATION_KINDS:
                t = cells[(p, n, rep, act)]
                if ds == "train":
                    traces[act] = [t.initial_train_loss] + t.train_loss
                else:
                    traces[act] = [t.initial_test_loss] + t.test_loss
            best = min(min(tr) for tr in traces.values())
            for act in ACTIVATION_KINDS:
                tr = traces[act]
                for tau in cfg.taus:
                    it = iterations_to_tau(tr, tr[0], best, tau)
                    counts[(p, n, act, rep, ds, tau)] = it
                    iter_rows.append([p, n, act, rep, ds, _fmt(tau),
                                      _fmt(it)])
    return counts


def _write_e1_profiles(cfg: ExperimentConfig, counts: dict, out: Path):
    probs = [(p.name, p.dim) for p in _instances(cfg)]
    for ds in ("train", "test"):
        for tau in cfg.taus:
            table = np.empty((len(probs), len(ACTIVATION_KINDS)))
            for i, (p, n) in enumerate(probs):
                for j, act in enumerate(ACTIVATION_KINDS):
                    table[i, j] = _median_or_fail(
                        [counts[(p, n, act, rep, ds, tau)]
                         for rep in cfg.seeds])
            _write_csv(out / f"profile_{ds}_tau{_tau_tag(tau)}.csv",
                       ["solver", "alpha", "rho"],
                       _profile_rows(table, list(ACTIVATION_KINDS)))


# --- E2: basis comparison at the start point --------------------------------

def _fit_column(kind, act, Y: SampleSet, fY):
    if kind == "rbf":
        return fit_rbf(Y, fY, kernel="gaussian")
    n = Y.dim
    if kind == HAT_DIAGONAL:
        basis = Basis(kind, n, activation=Activation(act))
        if len(Y) < basis.size:
            raise PoisednessError(
                f"{len(Y)} points cannot fit {basis.size} coefficients")
        return fit_regression(basis, Y, fY)
    basis = Basis(kind, n) if act is None else Basis(
        kind, n, activation=Activation(act))
    return fit_interpolation(basis, Y, fY)


def _run_e2(cfg: ExperimentConfig, out: Path) -> None:
    raw_rows, box_rows = [], []
    for problem in _instances(cfg):
        n_train, _ = standard_sizes(problem.dim)
        truth = (problem.evaluate(problem.x0), problem.gradient(problem.x0),
                 problem.hessian(problem.x0))
        for rep in cfg.seeds:
            pts = _raw_points(problem, rep, 0, n_train)
            fY = np.array([problem.evaluate(x) for x in pts])
            Y = SampleSet.from_points(pts, fvalues=fY)
            for label, kind, act in E2_COLUMNS:
                try:
                    model = _fit_column(kind, act, Y, fY)
                except PoisednessError as err:
                    log.warning("E2 %s seed %s column %s failed: %s",
                                problem.name, rep, label, err)
                    for metric in ("value", "gradient", "hessian"):
                        raw_rows.append([problem.name, problem.dim, rep,
                                         label, metric, ""])
                    continue
                errs = approx_errors(
                    model.value(problem.x0), truth[0],
                    model.gradient(problem.x0), truth[1],
                    model.hessian(problem.x0), truth[2])
                for metric, v in [("value", errs.value),
                                  ("gradient", errs.gradient),
                                  ("hessian", errs.hessian)]:
                    raw_rows.append([problem.name, problem.dim, rep, label,
                                     metric, repr(v)])
                    box_rows.append([label, metric, repr(v)])
    _write_csv(out / "metrics.csv",
               ["problem", "n", "seed", "basis_label", "metric", "value"],
               raw_rows)
    _write_csv(out / "box_metrics.csv", ["basis_label", "metric", "value"],
               box_rows)


# --- E3: network approximation accuracy at the start point ------------------

def _run_e3(cfg: ExperimentConfig, out: Path) -> None:
    raw_rows, box_rows = [], []
    for problem in _instances(cfg):
        truth = (problem.evaluate(problem.x0), problem.gradient(problem.x0),
                 problem.hessian(problem.x0))
        per_act = {act: {m: [] for m in ("value", "gradient", "hessian")}
                   for act in ACTIVATION_KINDS}
        for rep in cfg.seeds:
            Xtr, ytr, Xte, yte = _nn_datasets(problem, rep)
            tcfg = _train_config(cfg, problem, rep)
            for act in ACTIVATION_KINDS:
                mcfg = nn.MlpConfig(problem.dim, Activation(act))
                w, _ = nn.train(mcfg, (Xtr, ytr), (Xte, yte), tcfg)
                errs = approx_errors(
                    nn.forward(w, problem.x0), truth[0],
                    nn.input_gradient(w, problem.x0), truth[1],
                    nn.input_hessian(w, problem.x0), truth[2])
                for metric, v in [("value", errs.value),
                                  ("gradient", errs.gradient),
                                  ("hessian", errs.hessian)]:
                    raw_rows.append([problem.name, problem.dim, act, rep,
                                     metric, repr(v)])
                    per_act[act][metric].append(v)
        for act in ACTIVATION_KINDS:
            for metric in ("value", "gradient", "hessian"):
                med = float(np.median(per_act[act][metric]))
                box_rows.append([act, metric, repr(med)])
    _write_csv(out / "metrics.csv",
               ["problem", "n", "activation", "seed", "metric", "value"],
               raw_rows)
    _write_csv(out / "box_metrics.csv", ["basis_label", "metric", "value"],
               box_rows)


# --- E4: solver comparison under a shared evaluation budget -----------------

def _run_e4(cfg: ExperimentConfig, out: Path) -> None:
    chosen = [(si, label, surrogate)
              for si, (label, surrogate) in enumerate(E4_SOLVERS)
              if cfg.solvers is None or label in cfg.solvers]
    hist_rows, eval_rows = [], []
    rows = []  # (problem, rep) -> list of histories in solver order
    for problem in _instances(cfg):
        for rep in cfg.seeds:
            histories = []
            for si, label, surrogate in chosen:
                fle = FleConfig(surrogate=surrogate, **(cfg.fle or {}))
                seed = _cell_entropy(problem.name, problem.dim, rep, si)
                result = run(problem, fle, seed=seed)
                histories.append(result.history)
                for evals, best in result.history:
                    hist_rows.append([problem.name, problem.dim, label, rep,
                                      evals, repr(best)])
            rows.append((problem, rep, histories))
    _write_csv(out / "histories.csv",
               ["problem", "n", "solver", "seed", "evals", "best_f"],
               hist_rows)

    labels = [label for _, label, _ in chosen]
    tables = {tau: np.empty((len(rows), len(labels))) for tau in cfg.taus}
    for i, (problem, rep, histories) in enumerate(rows):
        f0 = histories[0][0][1]
        f_low = min(h[-1][1] for h in histories)
        for j, label in enumerate(labels):
            for tau in cfg.taus:
                t = evals_to_tau(histories[j], f0, f_low, tau)
                tables[tau][i, j] = np.nan if t is None else t
                eval_rows.append([problem.name, problem.dim, label, rep,
                                  _fmt(tau), _fmt(t)])
    _write_csv(out / "evals.csv",
               ["problem", "n", "solver", "seed", "tau", "evals"], eval_rows)
    for tau in cfg.taus:
        _write_csv(out / f"profile_tau{_tau_tag(tau)}.csv",
                   ["solver", "alpha", "rho"],
                   _profile_rows(tables[tau], labels))


_RUNNERS = {
    "E1_activations": _run_e1,
    "E2_bases": _run_e2,
    "E3_nn_approx": _run_e3,
    "E4_fle_vs_fles": _run_e4,
}


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run one experiment; returns the output directory."""
    import scipy

    norm = cfg.to_dict()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    _RUNNERS[cfg.experiment](cfg, out)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config": norm,
        "config_hash": config_hash(norm),
        "package_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "wall_time_s": round(time.monotonic() - t0, 3),
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


# --- profile rebuilding from raw experiment output --------------------------

def _read_csv(path: Path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def rebuild_profiles(src: Path, tau: float) -> list[Path]:
    """Recompute profile CSVs at ``tau`` from raw run CSVs in ``src``."""
    written = []
    if (src / "histories.csv").exists():
        rows = _read_csv(src / "histories.csv")
        cells = {}
        for r in rows:
            key = (r["problem"], int(r["n"]), int(r["seed"]))
            cells.setdefault(key, {}).setdefault(r["solver"], []).append(
                (int(r["evals"]), float(r["best_f"])))
        present = {r["solver"] for r in rows}
        labels = [label for label, _ in E4_SOLVERS if label in present]
        keys = list(cells)
        table = np.empty((len(keys), len(labels)))
        for i, key in enumerate(keys):
            hists = cells[key]
            f0 = hists[labels[0]][0][1]
            f_low = min(h[-1][1] for h in hists.values())
            for j, label in enumerate(labels):
                t = evals_to_tau(hists[label], f0, f_low, tau)
                table[i, j] = np.nan if t is None else t
        path = src / f"profile_tau{_tau_tag(tau)}.csv"
        _write_csv(path, ["solver", "alpha", "rho"],
                   _profile_rows(table, labels))
        return [path]
    if (src / "traces.csv").exists():
        rows = _read_csv(src / "traces.csv")
        cells = {}
        for r in rows:
            key = (r["problem"], int(r["n"]), r["activation"], int(r["seed"]))
            cells.setdefault(key, []).append(
                (int(r["epoch"]), float(r["train_loss"]),
                 float(r["test_loss"])))
        for v in cells.values():
            v.sort()
        probs = sorted({(p, n) for p, n, _, _ in cells},
                       key=lambda k: [str(k[0]), k[1]])
        reps = sorted({r for _, _, _, r in cells})
        for di, ds in enumerate(("train", "test")):
            table = np.empty((len(probs), len(ACTIVATION_KINDS)))
            for i, (p, n) in enumerate(probs):
                for j, act in enumerate(ACTIVATION_KINDS):
                    per_rep = []
                    for rep in reps:
                        traces = {a: [row[1 + di] for row in
                                      cells[(p, n, a, rep)]]
                                  for a in ACTIVATION_KINDS}
                        best = min(min(tr) for tr in traces.values())
                        tr = traces[act]
                        per_rep.append(iterations_to_tau(tr, tr[0], best,
                                                         tau))
                    table[i, j] = _median_or_fail(per_rep)
            path = src / f"profile_{ds}_tau{_tau_tag(tau)}.csv"
            _write_csv(path, ["solver", "alpha", "rho"],
                       _profile_rows(table, list(ACTIVATION_KINDS)))
            written.append(path)
        return written
    raise ConfigError(f"no histories.csv or traces.csv under {src}")


# --- command line -----------------------------------------------------------

def _cmd_run(args) -> int:
    cfg = validate_config(args.config, args.out)
    out = run_experiment(cfg)
    print(out)
    return 0


def _cmd_list_problems(args) -> int:
    listing = {}
    for pset in PROBLEM_SETS:
        if pset == SET53:
            listing[pset] = {p.name: p.dim for p in catalog(pset)}
        else:
            listing[pset] = [p.name for p in catalog(pset, 2)]
    if args.json:
        print(json.dumps(listing, indent=2))
        return 0
    for pset, entry in listing.items():
        print(f"{pset}:")
        if isinstance(entry, dict):
            for name, dim in entry.items():
                print(f"  {name} (n={dim})")
        else:
            for name in entry:
                print(f"  {name}")
    return 0


def _cmd_profile(args) -> int:
    for path in rebuild_profiles(Path(args.src), args.tau):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Run surrogate-model benchmark experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config")
    p_run.add_argument("--config", required=True,
                       help="JSON config or a manifest.json from a past run")
    p_run.add_argument("--out", default=None,
                       help="override the configured output directory")
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list-problems", help="list the problem catalog")
    p_list.add_argument("--json", action="store_true")
    p_list.set_defaults(func=_cmd_list_problems)

    p_prof = sub.add_parser(
        "profile", help="rebuild profile CSVs from raw run output")
    p_prof.add_argument("--from", dest="src", required=True)
    p_prof.add_argument("--tau", type=float, required=True)
    p_prof.set_defaults(func=_cmd_profile)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(json.dumps({"error": str(err), "field": err.field}),
              file=sys.stderr)
        return 2
    except Exception as err:  # surfaced as a machine-readable summary
        print(json.dumps({"error": f"{type(err).__name__}: {err}"}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
