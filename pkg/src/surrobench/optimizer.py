"""Full-low evaluation solver with optional surrogate gradients.

The solver alternates between two iteration classes. Full-eval iterations
take a quasi-Newton step: a gradient estimate (forward finite differences,
or a surrogate model once the run has collected enough evaluated points),
an inverse-Hessian BFGS update with a curvature guard, and an Armijo
backtracking line search on the true objective. Low-eval iterations poll
two opposite directions drawn uniformly from the unit sphere, with a
sufficient-decrease forcing function and expand/contract stepsize rules.

Mode switches: full to low when the line search would accept only a step
below lambda_switch * rho(alpha) or the direction is non-descent; low to
full when the count of consecutive unsuccessful polls exceeds the number
of backtracks of the last full-eval iteration.

Every objective evaluation passes through one counting wrapper that
enforces the budget and records the best-so-far history.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import nn_surrogate as nn
from .activations import Activation
from .poly_surrogate import (
    Basis,
    HAT_DIAGONAL,
    NATURAL,
    PoisednessError,
    fit_rbf,
    fit_regression,
)
from .problems import SET53, TestProblem
from .sampling import Dataset, sample_ball, select_local_sample

log = logging.getLogger(__name__)

SURROGATE_KINDS = (
    "none",
    "natural",
    "hat_sigmoid",
    "rbf_gaussian",
    "nn_relu",
    "nn_silu",
)
_NN_KINDS = ("nn_relu", "nn_silu")

FULL, LOW = "full", "low"


class BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class FleConfig:
    surrogate: str = "none"
    epsilon_curvature: float = 1e-10
    beta_bar: float = 1.0
    tau_backtrack: float = 0.5
    armijo_c: float = 1e-4
    rho_c: float = 1e-4  # forcing function rho(alpha) = rho_c * alpha^2
    lambda_expand: float = 2.0
    theta_contract: float = 0.5
    alpha0: float = 1.0
    lambda_switch: float = 1.0
    fd_step: float = 2.0 * math.sqrt(np.finfo(float).eps)
    zeta: float | None = None
    budget: int | None = None
    ball_radius: float = 0.1
    nn_lr: float = 1e-2
    nn_first_epochs: int = 5
    nn_later_epochs: int = 1
    stagnation_alpha: float = 1e-13

    def __post_init__(self):
        if self.surrogate not in SURROGATE_KINDS:
            raise ValueError(f"unknown surrogate {self.surrogate!r}")

    @property
    def effective_zeta(self) -> float:
        if self.zeta is not None:
            return self.zeta
        return 0.2 if self.surrogate in _NN_KINDS else 1.0

    def forcing(self, alpha: float) -> float:
        return self.rho_c * alpha**2


@dataclass
class RunResult:
    history: list  # (cumulative evals, best f so far), one entry per eval
    x: np.ndarray
    f: float
    reason: str  # budget | stagnation
    n_evals: int
    n_iterations: int
    fd_fallbacks: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["evals", "best_f"])
            for e, f in self.history:
                w.writerow([e, repr(f)])


class Evaluator:
    """Counting wrapper around the objective: budget plus history."""

    def __init__(self, problem: TestProblem, budget: int):
        self.problem = problem
        self.budget = budget
        self.count = 0
        self.best = math.inf
        self.history: list[tuple[int, float]] = []

    def __call__(self, x) -> float:
        # the very first evaluation is mandatory even under a zero budget
        if self.count >= self.budget and self.count >= 1:
            raise BudgetExhausted
        f = self.problem.evaluate(x)
        self.count += 1
        self.best = min(self.best, f)
        self.history.append((self.count, self.best))
        return f


def fd_gradient(evaluate, x, fx: float, h: float):
    """Forward-difference gradient; returns the stencil points as well."""
    x = np.asarray(x, dtype=float)
    n = x.size
    g = np.empty(n)
    stencil = []
    for i in range(n):
        xi = x.copy()
        xi[i] += h
        fi = evaluate(xi)
        g[i] = (fi - fx) / h
        stencil.append((xi, fi))
    return g, stencil


def bfgs_update(H_prev, s, y, eps_curvature: float):
    """Inverse-Hessian BFGS update, skipped under the curvature guard."""
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    sy = float(s @ y)
    if sy < eps_curvature * np.linalg.norm(s) * np.linalg.norm(y) or sy <= 0.0:
        return H_prev
    rho = 1.0 / sy
    n = s.size
    V = np.eye(n) - rho * np.outer(s, y)
    H = V @ H_prev @ V.T + rho * np.outer(s, s)
    return 0.5 * (H + H.T)


def initial_h0(s, y):
    """Scaled identity (y's)/(y'y) I, or the identity when curvature fails."""
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    sy = float(s @ y)
    yy = float(y @ y)
    if sy > 0.0 and yy > 0.0:
        return (sy / yy) * np.eye(s.size)
    return np.eye(s.size)


@dataclass
class BacktrackResult:
    beta: float | None  # accepted stepsize, None when the iteration aborts
    trials: list  # (point, f) in evaluation order
    backtracks: int
    switched: bool


def backtracking(evaluate, x, fx: float, p, g, cfg: FleConfig,
                 alpha: float) -> BacktrackResult:
    """Armijo backtracking; aborts once beta falls below the switch level."""
    gp = float(g @ p)
    if gp >= 0.0:
        return BacktrackResult(None, [], 0, True)
    beta = cfg.beta_bar
    trials: list = []
    threshold = cfg.lambda_switch * cfg.forcing(alpha)
    while True:
        if beta < threshold:
            return BacktrackResult(None, trials, len(trials), True)
        trial = x + beta * p
        ft = evaluate(trial)
        trials.append((trial, ft))
        if ft <= fx + cfg.armijo_c * beta * gp:
            return BacktrackResult(beta, trials, len(trials) - 1, False)
        beta *= cfg.tau_backtrack


@dataclass
class FleState:
    x: np.ndarray
    fx: float
    mode: str = FULL
    alpha: float = 1.0
    H: np.ndarray | None = None
    x_prev: np.ndarray | None = None
    g_prev: np.ndarray | None = None
    dataset: Dataset = field(default_factory=Dataset)
    last_fe_backtracks: int = 0
    unsuccessful_le: int = 0
    iteration: int = 0
    fd_fallbacks: int = 0
    evaluator: Evaluator | None = None
    rng: np.random.Generator | None = None
    # persistent network surrogate (warm-started across iterations)
    nn_weights: nn.MlpWeights | None = None
    nn_adam: nn.AdamState | None = None
    nn_rng: np.random.Generator | None = None
    nn_seed: object = None


def _poly_gradient(state: FleState, cfg: FleConfig, n: int) -> np.ndarray:
    Y = select_local_sample(state.dataset, state.x, n)
    if cfg.surrogate == "natural":
        basis = Basis(NATURAL, n)
    elif cfg.surrogate == "hat_sigmoid":
        basis = Basis(HAT_DIAGONAL, n, activation=Activation("sigmoid"))
    else:
        model = fit_rbf(Y, Y.fvalues, kernel="gaussian")
        return model.gradient(state.x)
    if len(Y) < basis.size:
        raise PoisednessError(
            f"{len(Y)} selected points cannot fit {basis.size} coefficients"
        )
    model = fit_regression(basis, Y, Y.fvalues)
    return model.gradient(state.x)


def _nn_gradient(state: FleState, cfg: FleConfig, n: int) -> np.ndarray:
    X = state.dataset.points_array()
    y = state.dataset.values_array()
    first = state.nn_weights is None
    if first:
        act = Activation("relu" if cfg.surrogate == "nn_relu" else "silu")
        base = state.x.copy()
        delta = float(np.max(np.linalg.norm(X - base, axis=1)))
        if delta <= 0.0:
            delta = cfg.ball_radius
        w = nn.init_weights(nn.MlpConfig(n, act), state.nn_seed)
        state.nn_weights = w.with_normalization(base, delta)
        state.nn_adam = nn.AdamState(state.nn_weights)
    epochs = cfg.nn_first_epochs if first else cfg.nn_later_epochs
    batch = nn.minibatch_size(SET53, len(y))
    nn.train_epochs(state.nn_weights, state.nn_adam, X, y, epochs,
                    cfg.nn_lr, batch, state.nn_rng)
    return nn.input_gradient(state.nn_weights, state.x)


def _insert_trials(state: FleState, cfg: FleConfig, trials) -> None:
    if not trials:
        return
    if cfg.surrogate in _NN_KINDS:
        for pt, f in trials:
            state.dataset.append(pt, f, "line-search-all")
    else:
        pt, f = trials[0]
        state.dataset.append(pt, f, "line-search-first")


def _quasi_newton_direction(state: FleState, cfg: FleConfig, g) -> np.ndarray:
    if state.x_prev is not None and state.g_prev is not None:
        s = state.x - state.x_prev
        y = g - state.g_prev
        if np.linalg.norm(s) > 0.0 and np.linalg.norm(y) > 0.0:
            if state.H is None:
                state.H = initial_h0(s, y)
            state.H = bfgs_update(state.H, s, y, cfg.epsilon_curvature)
    return -g if state.H is None else -(state.H @ g)


def _finish_full_step(state: FleState, cfg: FleConfig, g) -> None:
    """Line search along the quasi-Newton direction and bookkeeping."""
    p = _quasi_newton_direction(state, cfg, g)
    x_at_entry = state.x.copy()
    res = backtracking(state.evaluator, state.x, state.fx, p, g, cfg,
                       state.alpha)
    _insert_trials(state, cfg, res.trials)
    state.last_fe_backtracks = res.backtracks
    if res.beta is not None:
        state.x = x_at_entry + res.beta * p
        state.fx = res.trials[-1][1]
    else:
        state.mode = LOW
        state.unsuccessful_le = 0
    state.x_prev = x_at_entry
    state.g_prev = g


def fe_iteration(state: FleState, cfg: FleConfig) -> FleState:
    """Plain full-eval iteration: forward-difference gradient, BFGS step."""
    g, _ = fd_gradient(state.evaluator, state.x, state.fx, cfg.fd_step)
    _finish_full_step(state, cfg, g)
    return state


def fe_s_iteration(state: FleState, cfg: FleConfig) -> FleState:
    """Full-eval iteration with dataset bookkeeping and surrogate gradients.

    Below the dataset threshold zeta (n+1)(n+2)/2 the gradient falls back
    to finite differences and the stencil enters the dataset. At or above
    it, one extra uniformly drawn point from B(x_k; 0.1) is evaluated and
    added, the surrogate is built, and its gradient replaces the
    finite-difference one. A poisedness failure inside the fit reverts to
    finite differences for this iteration.
    """
    n = state.x.size
    threshold = cfg.effective_zeta * (n + 1) * (n + 2) / 2.0
    g = None
    if cfg.surrogate != "none" and len(state.dataset) >= threshold:
        u = sample_ball(state.x, cfg.ball_radius, 1, state.rng)[0]
        fu = state.evaluator(u)
        state.dataset.append(u, fu, "ball-extra")
        try:
            if cfg.surrogate in _NN_KINDS:
                g = _nn_gradient(state, cfg, n)
            else:
                g = _poly_gradient(state, cfg, n)
        except PoisednessError as err:
            log.info("surrogate fit failed (%s); falling back to FD", err)
            state.fd_fallbacks += 1
    if g is None:
        g, stencil = fd_gradient(state.evaluator, state.x, state.fx,
                                 cfg.fd_step)
        state.dataset.append(state.x, state.fx, "fd-stencil")
        for pt, f in stencil:
            state.dataset.append(pt, f, "fd-stencil")
    _finish_full_step(state, cfg, g)
    return state


def le_iteration(state: FleState, cfg: FleConfig) -> FleState:
    """Direct-search iteration polling d and -d on the unit sphere."""
    n = state.x.size
    d = state.rng.standard_normal(n)
    d /= np.linalg.norm(d)
    x_at_entry = state.x.copy()
    success = False
    for dk in (d, -d):
        trial = x_at_entry + state.alpha * dk
        ft = state.evaluator(trial)
        state.dataset.append(trial, ft, "poll")
        if ft <= state.fx - cfg.forcing(state.alpha):
            state.x = trial
            state.fx = ft
            success = True
            break
    if success:
        state.alpha *= cfg.lambda_expand
        state.unsuccessful_le = 0
    else:
        state.alpha *= cfg.theta_contract
        state.unsuccessful_le += 1
        if state.unsuccessful_le > state.last_fe_backtracks:
            state.mode = FULL
            state.unsuccessful_le = 0
    state.x_prev = x_at_entry
    return state


def run(problem: TestProblem, cfg: FleConfig, seed=0, callback=None,
        engine: str = "auto") -> RunResult:
    """Minimize ``problem`` from its start point under an evaluation budget.

    ``engine`` selects the full-eval iteration flavor: "fle" for the plain
    finite-difference method, "fles" for the dataset-aware variant, "auto"
    to pick from ``cfg.surrogate``. With surrogate "none" both engines
    produce identical evaluation histories.
    """
    if engine not in ("auto", "fle", "fles"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "auto":
        engine = "fle" if cfg.surrogate == "none" else "fles"
    if engine == "fle" and cfg.surrogate != "none":
        raise ValueError("plain engine cannot build surrogates")
    n = problem.dim
    budget = cfg.budget if cfg.budget is not None else 100 * (n + 1)
    evaluator = Evaluator(problem, budget)
    ss = np.random.SeedSequence(seed)
    main_ss, nn_init_ss, nn_shuffle_ss = ss.spawn(3)
    state = FleState(x=problem.x0.copy(), fx=math.nan, alpha=cfg.alpha0)
    state.evaluator = evaluator
    state.rng = np.random.default_rng(main_ss)
    state.nn_rng = np.random.default_rng(nn_shuffle_ss)
    state.nn_seed = nn_init_ss
    full_step = fe_iteration if engine == "fle" else fe_s_iteration
    reason = "budget"
    try:
        state.fx = evaluator(state.x)
        while True:
            if state.alpha < cfg.stagnation_alpha:
                reason = "stagnation"
                break
            if evaluator.count >= budget:
                break
            if state.mode == FULL:
                full_step(state, cfg)
            else:
                le_iteration(state, cfg)
            state.iteration += 1
            if callback is not None:
                callback(state)
    except BudgetExhausted:
        reason = "budget"
    return RunResult(evaluator.history, state.x.copy(), state.fx, reason,
                     evaluator.count, state.iteration, state.fd_fallbacks)
