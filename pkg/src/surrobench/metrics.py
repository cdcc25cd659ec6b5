"""Accuracy metrics, convergence tests, and comparison statistics.

Relative errors use the symmetric denominator max(|a|, |b|) so the metric
is bounded by 1 whenever the signs agree, and is defined as zero when both
quantities vanish. Convergence tests follow the standard data-profile
convention: a run reaches level tau once it has closed a (1 - tau)
fraction of the gap between the starting value and the best value any
competing run achieved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPECTRAL, FROBENIUS = "spectral", "fro"


def _ratio(diff: float, na: float, nb: float) -> float:
    denom = max(na, nb)
    if denom == 0.0:
        return 0.0
    return diff / denom


def value_error(a: float, b: float) -> float:
    return _ratio(abs(a - b), abs(a), abs(b))


def gradient_error(ga, gb) -> float:
    ga = np.asarray(ga, dtype=float)
    gb = np.asarray(gb, dtype=float)
    return _ratio(float(np.linalg.norm(ga - gb)),
                  float(np.linalg.norm(ga)), float(np.linalg.norm(gb)))


def hessian_error(Ha, Hb, norm: str = SPECTRAL) -> float:
    Ha = np.asarray(Ha, dtype=float)
    Hb = np.asarray(Hb, dtype=float)
    if norm == SPECTRAL:
        nrm = lambda M: float(np.linalg.norm(M, 2))
    elif norm == FROBENIUS:
        nrm = lambda M: float(np.linalg.norm(M, "fro"))
    else:
        raise ValueError(f"unknown norm {norm!r}")
    return _ratio(nrm(Ha - Hb), nrm(Ha), nrm(Hb))


@dataclass(frozen=True)
class ApproxErrors:
    value: float
    gradient: float
    hessian: float


def approx_errors(model_val, f_val, model_grad, f_grad, model_hess, f_hess,
                  norm: str = SPECTRAL) -> ApproxErrors:
    return ApproxErrors(value_error(model_val, f_val),
                        gradient_error(model_grad, f_grad),
                        hessian_error(model_hess, f_hess, norm))


def iterations_to_tau(trace, L0: float, best: float, tau: float):
    """First index i of ``trace`` with L0 - L_i >= (1 - tau)(L0 - best).

    ``trace`` starts with the pre-training loss, so the returned index is
    the number of epochs needed. Returns None when no entry qualifies.
    """
    trace = np.asarray(trace, dtype=float)
    target = (1.0 - tau) * (L0 - best)
    for i, L in enumerate(trace):
        if L0 - L >= target:
            return i
    return None


def evals_to_tau(history, f0: float, best: float, tau: float):
    """Evaluations needed to close a (1 - tau) fraction of the f-gap.

    ``history`` is the (evals, best-so-far) record of a run. Returns None
    when the run never qualifies.
    """
    target = (1.0 - tau) * (f0 - best)
    for evals, f in history:
        if f0 - f >= target:
            return evals
    return None


@dataclass(frozen=True)
class ProfileCurve:
    label: str
    alphas: np.ndarray  # shared grid: the union of all ratio breakpoints
    rhos: np.ndarray  # fractions in [0, 1], nondecreasing with alpha


def profile_ratios(costs) -> tuple[np.ndarray, float]:
    """Performance ratios of a problems-by-solvers cost table.

    NaN entries mark failures. Each cost is divided by the smallest finite
    cost in its row; failed entries (and every entry of an all-failed row)
    receive twice the largest finite ratio of the whole table.
    """
    costs = np.asarray(costs, dtype=float)
    if costs.ndim != 2:
        raise ValueError("cost table must be 2-D")
    m, s = costs.shape
    ratios = np.full((m, s), np.nan)
    for p in range(m):
        row = costs[p]
        finite = np.isfinite(row)
        if finite.any():
            mn = np.min(row[finite])
            if mn == 0.0:
                # a zero-cost entry attains the minimum by definition;
                # positive costs against a zero minimum fall under the
                # failure rule
                ratios[p, finite] = np.where(row[finite] == 0.0, 1.0,
                                             np.nan)
            else:
                ratios[p, finite] = row[finite] / mn
    finite_ratios = ratios[np.isfinite(ratios)]
    failure = 2.0 * float(np.max(finite_ratios)) if finite_ratios.size else 2.0
    ratios[~np.isfinite(ratios)] = failure
    return ratios, failure


def performance_profile(costs, labels=None) -> list[ProfileCurve]:
    """Per-solver profile curves rho_s(alpha), right-continuous steps."""
    ratios, _ = profile_ratios(costs)
    m, s = ratios.shape
    if labels is None:
        labels = [str(j) for j in range(s)]
    if len(labels) != s:
        raise ValueError("one label per solver required")
    alphas = np.unique(ratios)
    curves = []
    for j in range(s):
        rho = np.sum(ratios[:, j][None, :] <= alphas[:, None], axis=1) / m
        curves.append(ProfileCurve(str(labels[j]), alphas.copy(), rho))
    return curves


@dataclass(frozen=True)
class BoxStats:
    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple
    n: int
    n_dropped: int


def _half_median(h: np.ndarray, fallback: float) -> float:
    return float(np.median(h)) if h.size else fallback


def boxplot_stats(values, lo: float = 0.0, hi: float = 5.0) -> BoxStats:
    """Five-number box statistics on the values inside [lo, hi].

    Quartiles are the medians of the lower and upper halves, excluding the
    overall median element when the count is odd. Whiskers reach the most
    extreme values within 1.5 interquartile ranges of the box.
    """
    v = np.asarray(values, dtype=float)
    keep = (v >= lo) & (v <= hi)
    dropped = int(v.size - np.count_nonzero(keep))
    v = np.sort(v[keep])
    n = v.size
    if n == 0:
        raise ValueError("no values inside the admissible range")
    med = float(np.median(v))
    half = n // 2
    q1 = _half_median(v[:half], med)
    q3 = _half_median(v[half + (n % 2):], med)
    iqr = q3 - q1
    inside = v[(v >= q1 - 1.5 * iqr) & (v <= q3 + 1.5 * iqr)]
    out = v[(v < q1 - 1.5 * iqr) | (v > q3 + 1.5 * iqr)]
    return BoxStats(med, q1, q3, float(inside[0]), float(inside[-1]),
                    tuple(float(o) for o in out), n, dropped)
