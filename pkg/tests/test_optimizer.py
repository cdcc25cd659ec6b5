"""Solver building blocks and full runs of both iteration flavors."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from surrobench.optimizer import (
    BudgetExhausted,
    Evaluator,
    FleConfig,
    SURROGATE_KINDS,
    backtracking,
    bfgs_update,
    fd_gradient,
    initial_h0,
    run,
)
from surrobench.problems import SET38, SYNTHETIC, TestProblem, catalog, get_problem


def constant_problem(n=2, c=1.0):
    return TestProblem("CONST", n, np.zeros(n), lambda x: c,
                       lambda x: np.zeros(n), lambda x: np.zeros((n, n)))


def test_config_validation_and_defaults():
    cfg = FleConfig()
    assert cfg.surrogate == "none"
    assert cfg.forcing(2.0) == 1e-4 * 4.0
    assert cfg.effective_zeta == 1.0
    assert FleConfig(surrogate="nn_relu").effective_zeta == 0.2
    assert FleConfig(surrogate="nn_relu", zeta=0.7).effective_zeta == 0.7
    with pytest.raises(ValueError):
        FleConfig(surrogate="kriging")


def test_evaluator_budget_and_history():
    p = get_problem(SYNTHETIC, "SPHERE", 2)
    ev = Evaluator(p, 3)
    ev(np.array([1.0, 1.0]))
    ev(np.array([2.0, 0.0]))
    ev(np.array([0.5, 0.0]))
    with pytest.raises(BudgetExhausted):
        ev(np.zeros(2))
    # history pairs cumulative count with the best value so far
    assert ev.history == [(1, 1.0), (2, 1.0), (3, 0.125)]


def test_evaluator_first_eval_allowed_under_zero_budget():
    p = get_problem(SYNTHETIC, "SPHERE", 5)
    res = run(p, FleConfig(budget=0))
    assert res.history == [(1, 2.5)]
    assert res.n_evals == 1 and res.reason == "budget"


def test_fd_gradient():
    p = get_problem(SYNTHETIC, "DIAGQUAD", 3)
    ev = Evaluator(p, 100)
    x = np.array([1.0, -2.0, 0.5])
    fx = ev(x)
    g, stencil = fd_gradient(ev, x, fx, 1e-7)
    assert_allclose(g, p.gradient(x), atol=1e-5)
    assert len(stencil) == 3 and ev.count == 4
    assert stencil[0][0][0] == pytest.approx(x[0] + 1e-7)


def test_bfgs_update_secant_and_symmetry():
    rng = np.random.default_rng(3)
    H = np.eye(4)
    s = rng.standard_normal(4)
    y = s + 0.1 * rng.standard_normal(4)
    if float(s @ y) <= 0:
        y = s
    H2 = bfgs_update(H, s, y, 1e-10)
    assert_allclose(H2, H2.T)
    assert_allclose(H2 @ y, s, atol=1e-12)  # secant equation


def test_bfgs_update_curvature_guard_keeps_object():
    H = np.eye(3)
    s = np.array([1.0, 0.0, 0.0])
    assert bfgs_update(H, s, -s, 1e-10) is H  # negative curvature
    near_orth = np.array([1e-12, 1.0, 0.0])  # s'y tiny against |s||y|
    assert bfgs_update(H, s, near_orth, 1e-10) is H


def test_initial_h0():
    s = np.array([1.0, 0.0])
    y = np.array([0.5, 0.1])
    H0 = initial_h0(s, y)
    assert_allclose(H0, (0.5 / 0.26) * np.eye(2))
    assert_allclose(initial_h0(s, -s), np.eye(2))  # fallback


def quadratic_eval(budget=1000):
    p = get_problem(SYNTHETIC, "SPHERE", 1)
    return Evaluator(p, budget)


def test_backtracking_accepts_full_step_on_quadratic():
    ev = quadratic_eval()
    x = np.array([1.0])
    res = backtracking(ev, x, 0.5, np.array([-1.0]), np.array([1.0]),
                       FleConfig(), alpha=1.0)
    assert res.beta == 1.0
    assert res.backtracks == 0 and not res.switched
    assert res.trials[-1][1] == 0.0


def test_backtracking_counts_backtracks():
    # start far out: f(x + beta p) grows until beta shrinks the step enough
    ev = quadratic_eval()
    x = np.array([1.0])
    p = np.array([-4.0])  # overshoots: needs two halvings to pass Armijo
    res = backtracking(ev, x, 0.5, p, np.array([1.0]), FleConfig(), 1.0)
    assert res.beta == 0.25
    assert res.backtracks == 2
    assert len(res.trials) == 3


def test_backtracking_non_descent_switches_without_evals():
    ev = quadratic_eval()
    res = backtracking(ev, np.array([1.0]), 0.5, np.array([1.0]),
                       np.array([1.0]), FleConfig(), 1.0)
    assert res.switched and res.beta is None
    assert res.trials == [] and res.backtracks == 0
    assert ev.count == 0


def test_backtracking_aborts_below_switch_threshold():
    # a huge alpha raises the abort threshold above the initial step
    ev = quadratic_eval()
    res = backtracking(ev, np.array([1.0]), 0.5, np.array([-1.0]),
                       np.array([1.0]), FleConfig(), alpha=1e4)
    assert res.switched and res.beta is None and ev.count == 0


def test_run_converges_on_sphere():
    p = get_problem(SYNTHETIC, "SPHERE", 5)
    res = run(p, FleConfig())
    assert res.f < 1e-10
    assert np.linalg.norm(p.gradient(res.x)) < 1e-4
    assert res.reason in ("budget", "stagnation")


def test_run_respects_budget():
    p = get_problem(SET38, "TRIDIA", 4)
    res = run(p, FleConfig(budget=37))
    assert res.n_evals <= 37
    assert res.history[-1][0] == res.n_evals


def test_run_history_is_monotone():
    p = get_problem(SET38, "FREUROTH", 5)
    res = run(p, FleConfig(budget=200), seed=1)
    best = [f for _, f in res.history]
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
    evals = [e for e, _ in res.history]
    assert evals == list(range(1, len(evals) + 1))


def test_run_is_deterministic():
    p = get_problem(SET38, "COSINE", 4)
    a = run(p, FleConfig(budget=150), seed=5)
    b = run(p, FleConfig(budget=150), seed=5)
    assert a.history == b.history
    assert_allclose(a.x, b.x)


def test_seed_changes_surrogate_runs():
    # the network init draws from the run seed, so trajectories diverge
    p = get_problem(SET38, "DQRTIC", 3)
    cfg = FleConfig(surrogate="nn_relu", budget=200)
    a = run(p, cfg, seed=5)
    b = run(p, cfg, seed=6)
    assert a.history != b.history
    assert a.history == run(p, cfg, seed=5).history


def test_run_stagnates_on_flat_objective():
    # on an identically zero objective every poll fails its sufficient
    # decrease exactly, so alpha contracts until the stagnation floor
    res = run(constant_problem(c=0.0), FleConfig(budget=10000))
    assert res.reason == "stagnation"
    assert res.f == 0.0
    assert res.n_evals < 10000


def test_engine_selection():
    p = get_problem(SYNTHETIC, "SPHERE", 2)
    with pytest.raises(ValueError):
        run(p, FleConfig(), engine="newton")
    with pytest.raises(ValueError):
        run(p, FleConfig(surrogate="natural"), engine="fle")


def test_engines_agree_with_no_surrogate():
    for name, n in (("ARWHEAD", 6), ("TRIDIA", 6)):
        p = get_problem(SET38, name, n)
        plain = run(p, FleConfig(budget=300), seed=2, engine="fle")
        aware = run(p, FleConfig(budget=300), seed=2, engine="fles")
        assert plain.history == aware.history
        assert_allclose(plain.x, aware.x)


def test_all_surrogate_kinds_run():
    p = get_problem(SET38, "DQRTIC", 6)
    finals = {}
    for kind in SURROGATE_KINDS:
        res = run(p, FleConfig(surrogate=kind, budget=350), seed=0)
        assert res.history[-1][1] <= res.history[0][1]
        finals[kind] = res.history[-1][1]
    assert all(np.isfinite(v) for v in finals.values())


def test_surrogate_run_tracks_fd_fallbacks():
    # at n=2 the diagonal basis needs 3n+1 = 7 > (n+1)(n+2)/2 = 6 selected
    # points, so every surrogate attempt falls back to finite differences
    p = get_problem(SYNTHETIC, "SPHERE", 2)
    res = run(p, FleConfig(surrogate="hat_sigmoid", budget=120), seed=0)
    assert res.fd_fallbacks > 0


def test_spd_inverse_hessian_via_callback():
    p = get_problem(SYNTHETIC, "TRIDIAGQUAD", 6)
    mins = []

    def watch(state):
        if state.H is not None:
            mins.append(float(np.min(np.linalg.eigvalsh(state.H))))

    run(p, FleConfig(budget=400), callback=watch)
    assert mins and min(mins) > 0.0


def test_insertion_policy_by_surrogate_kind():
    p = get_problem(SYNTHETIC, "DIAGQUAD", 3)
    seen = {}

    def watch(state):
        seen["tags"] = set(state.dataset.tags)

    run(p, FleConfig(surrogate="natural", budget=200), seed=3, callback=watch)
    poly_tags = seen["tags"]
    run(p, FleConfig(surrogate="nn_relu", budget=200), seed=3, callback=watch)
    nn_tags = seen["tags"]
    assert "line-search-first" in poly_tags
    assert "line-search-all" not in poly_tags
    assert "line-search-all" in nn_tags
    assert "line-search-first" not in nn_tags


def test_result_csv(tmp_path):
    p = get_problem(SYNTHETIC, "SPHERE", 3)
    res = run(p, FleConfig(budget=25))
    path = tmp_path / "hist.csv"
    res.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "evals,best_f"
    assert len(lines) == len(res.history) + 1
    e, f = lines[1].split(",")
    assert (int(e), float(f)) == res.history[0]
