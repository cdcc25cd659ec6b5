"""Smooth unconstrained test problems with analytic derivatives.

Native renditions of classic CUTEst objectives, organised in three catalogs:

* ``SET38``  -- functions whose dimension is chosen by the caller,
* ``SET53``  -- functions with a fixed, conventional dimension,
* ``SYNTHETIC`` -- convex quadratics with known minimizers, used as oracles.

Each problem carries closed-form value, gradient, and Hessian evaluators
together with the conventional starting point of the reference formula.
Evaluators are pure: same input, same bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SET38 = "SET38"
SET53 = "SET53"
SYNTHETIC = "SYNTHETIC"

PROBLEM_SETS = (SET38, SET53, SYNTHETIC)


@dataclass(frozen=True)
class TestProblem:
    """A smooth objective with analytic first and second derivatives."""

    __test__ = False  # not a pytest class despite the name

    name: str
    dim: int
    x0: np.ndarray
    _f: Callable[[np.ndarray], float] = field(repr=False)
    _g: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _h: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(
                f"{self.name}: expected shape ({self.dim},), got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise ValueError(f"{self.name}: non-finite input")
        return x

    def evaluate(self, x) -> float:
        return float(self._f(self._check(x)))

    def gradient(self, x) -> np.ndarray:
        return np.asarray(self._g(self._check(x)), dtype=float)

    def hessian(self, x) -> np.ndarray:
        H = np.asarray(self._h(self._check(x)), dtype=float)
        # enforce exact symmetry regardless of assembly order
        return 0.5 * (H + H.T)


def _least_squares(name, x0, residuals, jac, rhess):
    """Build a sum-of-squares problem f = sum r_i^2 from residual callbacks.

    ``rhess(x, v)`` must return sum_i v_i * Hess(r_i)(x).
    """
    x0 = np.asarray(x0, dtype=float)

    def f(x):
        r = residuals(x)
        return float(r @ r)

    def g(x):
        return 2.0 * (jac(x).T @ residuals(x))

    def h(x):
        J = jac(x)
        return 2.0 * (J.T @ J + rhess(x, residuals(x)))

    return TestProblem(name, x0.size, x0, f, g, h)


# ---------------------------------------------------------------------------
# SET38: dimension chosen by the caller
# ---------------------------------------------------------------------------


def _arwhead(n):
    # sum_{i<n} [ (x_i^2 + x_n^2)^2 - 4 x_i + 3 ]
    def f(x):
        u = x[:-1] ** 2 + x[-1] ** 2
        return float(np.sum(u**2 - 4.0 * x[:-1] + 3.0))

    def g(x):
        u = x[:-1] ** 2 + x[-1] ** 2
        out = np.zeros_like(x)
        out[:-1] = 4.0 * x[:-1] * u - 4.0
        out[-1] = 4.0 * x[-1] * np.sum(u)
        return out

    def h(x):
        u = x[:-1] ** 2 + x[-1] ** 2
        H = np.zeros((n, n))
        idx = np.arange(n - 1)
        H[idx, idx] = 4.0 * u + 8.0 * x[:-1] ** 2
        H[idx, -1] = 8.0 * x[:-1] * x[-1]
        H[-1, idx] = H[idx, -1]
        H[-1, -1] = 4.0 * np.sum(u) + 8.0 * (n - 1) * x[-1] ** 2
        return H

    return TestProblem("ARWHEAD", n, np.ones(n), f, g, h)


def _cosine(n):
    # sum_{i<n} cos(x_i^2 - x_{i+1}/2)
    def f(x):
        return float(np.sum(np.cos(x[:-1] ** 2 - 0.5 * x[1:])))

    def g(x):
        s = np.sin(x[:-1] ** 2 - 0.5 * x[1:])
        out = np.zeros_like(x)
        out[:-1] -= 2.0 * x[:-1] * s
        out[1:] += 0.5 * s
        return out

    def h(x):
        u = x[:-1] ** 2 - 0.5 * x[1:]
        s, c = np.sin(u), np.cos(u)
        H = np.zeros((n, n))
        idx = np.arange(n - 1)
        np.add.at(H, (idx, idx), -4.0 * x[:-1] ** 2 * c - 2.0 * s)
        np.add.at(H, (idx, idx + 1), x[:-1] * c)
        np.add.at(H, (idx + 1, idx), x[:-1] * c)
        np.add.at(H, (idx + 1, idx + 1), -0.25 * c)
        return H

    return TestProblem("COSINE", n, np.ones(n), f, g, h)


def _dixon3dq(n):
    # (x_1 - 1)^2 + sum_{i=2}^{n-1} (x_i - x_{i+1})^2 + (x_n - 1)^2
    def f(x):
        mid = x[1:-1] - x[2:]
        return float((x[0] - 1.0) ** 2 + np.sum(mid**2) + (x[-1] - 1.0) ** 2)

    def g(x):
        out = np.zeros_like(x)
        out[0] = 2.0 * (x[0] - 1.0)
        out[-1] = 2.0 * (x[-1] - 1.0)
        mid = x[1:-1] - x[2:]
        out[1:-1] += 2.0 * mid
        out[2:] -= 2.0 * mid
        return out

    def h(x):
        H = np.zeros((n, n))
        H[0, 0] = 2.0
        H[-1, -1] += 2.0
        for i in range(1, n - 1):
            H[i, i] += 2.0
            H[i + 1, i + 1] += 2.0
            H[i, i + 1] -= 2.0
            H[i + 1, i] -= 2.0
        return H

    return TestProblem("DIXON3DQ", n, -np.ones(n), f, g, h)


def _dqrtic(n, name="DQRTIC"):
    i = np.arange(1.0, n + 1.0)

    def f(x):
        return float(np.sum((x - i) ** 4))

    def g(x):
        return 4.0 * (x - i) ** 3

    def h(x):
        return np.diag(12.0 * (x - i) ** 2)

    return TestProblem(name, n, 2.0 * np.ones(n), f, g, h)


def _engval1(n):
    # sum_{i<n} [ (x_i^2 + x_{i+1}^2)^2 - 4 x_i + 3 ]
    def f(x):
        u = x[:-1] ** 2 + x[1:] ** 2
        return float(np.sum(u**2 - 4.0 * x[:-1] + 3.0))

    def g(x):
        u = x[:-1] ** 2 + x[1:] ** 2
        out = np.zeros_like(x)
        out[:-1] += 4.0 * x[:-1] * u - 4.0
        out[1:] += 4.0 * x[1:] * u
        return out

    def h(x):
        u = x[:-1] ** 2 + x[1:] ** 2
        H = np.zeros((n, n))
        idx = np.arange(n - 1)
        np.add.at(H, (idx, idx), 4.0 * u + 8.0 * x[:-1] ** 2)
        np.add.at(H, (idx + 1, idx + 1), 4.0 * u + 8.0 * x[1:] ** 2)
        cross = 8.0 * x[:-1] * x[1:]
        np.add.at(H, (idx, idx + 1), cross)
        np.add.at(H, (idx + 1, idx), cross)
        return H

    return TestProblem("ENGVAL1", n, 2.0 * np.ones(n), f, g, h)


def _freuroth(n):
    # chained Freudenstein-Roth
    def residuals(x):
        a, b = x[:-1], x[1:]
        r1 = a + 5.0 * b**2 - b**3 - 2.0 * b - 13.0
        r2 = a + b**3 + b**2 - 14.0 * b - 29.0
        return np.concatenate([r1, r2])

    def jac(x):
        b = x[1:]
        m = n - 1
        J = np.zeros((2 * m, n))
        idx = np.arange(m)
        J[idx, idx] = 1.0
        J[idx, idx + 1] = 10.0 * b - 3.0 * b**2 - 2.0
        J[m + idx, idx] = 1.0
        J[m + idx, idx + 1] = 3.0 * b**2 + 2.0 * b - 14.0
        return J

    def rhess(x, v):
        b = x[1:]
        m = n - 1
        H = np.zeros((n, n))
        np.add.at(H, (np.arange(1, n), np.arange(1, n)), v[:m] * (10.0 - 6.0 * b))
        np.add.at(H, (np.arange(1, n), np.arange(1, n)), v[m:] * (6.0 * b + 2.0))
        return H

    x0 = np.zeros(n)
    x0[0], x0[1] = 0.5, -2.0
    return _least_squares("FREUROTH", x0, residuals, jac, rhess)


def _nondia(n):
    # Shanno's nondiagonal Rosenbrock variant
    def residuals(x):
        return np.concatenate([[x[0] - 1.0], 10.0 * (x[0] - x[:-1] ** 2)])

    def jac(x):
        J = np.zeros((n, n))
        J[0, 0] = 1.0
        J[1:, 0] = 10.0
        idx = np.arange(1, n)
        J[idx, idx - 1] += -20.0 * x[:-1]
        return J

    def rhess(x, v):
        H = np.zeros((n, n))
        idx = np.arange(n - 1)
        np.add.at(H, (idx, idx), -20.0 * v[1:])
        return H

    return _least_squares("NONDIA", -np.ones(n), residuals, jac, rhess)


def _nondquar(n):
    # (x_1-x_2)^2 + (x_{n-1}+x_n)^2 + sum_{i<=n-2} (x_i+x_{i+1}+x_n)^4
    def f(x):
        u = x[:-2] + x[1:-1] + x[-1]
        return float(
            (x[0] - x[1]) ** 2 + (x[-2] + x[-1]) ** 2 + np.sum(u**4)
        )

    def g(x):
        u = x[:-2] + x[1:-1] + x[-1]
        out = np.zeros_like(x)
        out[0] += 2.0 * (x[0] - x[1])
        out[1] -= 2.0 * (x[0] - x[1])
        out[-2] += 2.0 * (x[-2] + x[-1])
        out[-1] += 2.0 * (x[-2] + x[-1])
        cu = 4.0 * u**3
        out[:-2] += cu
        out[1:-1] += cu
        out[-1] += np.sum(cu)
        return out

    def h(x):
        u = x[:-2] + x[1:-1] + x[-1]
        H = np.zeros((n, n))
        H[0, 0] += 2.0
        H[1, 1] += 2.0
        H[0, 1] -= 2.0
        H[1, 0] -= 2.0
        H[-2, -2] += 2.0
        H[-1, -1] += 2.0
        H[-2, -1] += 2.0
        H[-1, -2] += 2.0
        w = 12.0 * u**2
        for i in range(n - 2):
            for a in (i, i + 1, n - 1):
                for b in (i, i + 1, n - 1):
                    H[a, b] += w[i]
        return H

    x0 = np.ones(n)
    x0[1::2] = -1.0
    return TestProblem("NONDQUAR", n, x0, f, g, h)


def _power(n):
    # Oren's power function: (sum i x_i^2)^2
    i = np.arange(1.0, n + 1.0)

    def f(x):
        return float(np.sum(i * x**2) ** 2)

    def g(x):
        return 4.0 * np.sum(i * x**2) * (i * x)

    def h(x):
        s = np.sum(i * x**2)
        return 4.0 * s * np.diag(i) + 8.0 * np.outer(i * x, i * x)

    return TestProblem("POWER", n, np.ones(n), f, g, h)


def _sinquad(n):
    # (x_1-1)^4 + sum_{1<i<n} (sin(x_i-x_n) - x_1^2 + x_i^2)^2 + (x_n^2-x_1^2)^2
    def residuals(x):
        mid = np.sin(x[1:-1] - x[-1]) - x[0] ** 2 + x[1:-1] ** 2
        return np.concatenate([[(x[0] - 1.0) ** 2], mid, [x[-1] ** 2 - x[0] ** 2]])

    def jac(x):
        m = n - 2
        J = np.zeros((m + 2, n))
        J[0, 0] = 2.0 * (x[0] - 1.0)
        c = np.cos(x[1:-1] - x[-1])
        idx = np.arange(1, m + 1)
        J[idx, 0] = -2.0 * x[0]
        J[idx, idx] = c + 2.0 * x[1:-1]
        J[idx, -1] = -c
        J[-1, 0] = -2.0 * x[0]
        J[-1, -1] = 2.0 * x[-1]
        return J

    def rhess(x, v):
        m = n - 2
        s = np.sin(x[1:-1] - x[-1])
        H = np.zeros((n, n))
        H[0, 0] += 2.0 * v[0]  # residual (x_1-1)^2
        vm = v[1 : m + 1]
        H[0, 0] += np.sum(-2.0 * vm)
        idx = np.arange(1, m + 1)
        np.add.at(H, (idx, idx), vm * (2.0 - s))
        np.add.at(H, (idx, np.full(m, n - 1)), vm * s)
        np.add.at(H, (np.full(m, n - 1), idx), vm * s)
        H[-1, -1] += np.sum(-vm * s)
        H[0, 0] += -2.0 * v[-1]
        H[-1, -1] += 2.0 * v[-1]
        return H

    return _least_squares("SINQUAD", 0.1 * np.ones(n), residuals, jac, rhess)


def _tridia(n):
    # (x_1 - 1)^2 + sum_{i=2}^n i (2 x_i - x_{i-1})^2
    w = np.arange(2.0, n + 1.0)

    def f(x):
        v = 2.0 * x[1:] - x[:-1]
        return float((x[0] - 1.0) ** 2 + np.sum(w * v**2))

    def g(x):
        v = 2.0 * x[1:] - x[:-1]
        out = np.zeros_like(x)
        out[0] = 2.0 * (x[0] - 1.0)
        out[1:] += 4.0 * w * v
        out[:-1] -= 2.0 * w * v
        return out

    def h(x):
        H = np.zeros((n, n))
        H[0, 0] = 2.0
        idx = np.arange(1, n)
        np.add.at(H, (idx, idx), 8.0 * w)
        np.add.at(H, (idx - 1, idx - 1), 2.0 * w)
        np.add.at(H, (idx, idx - 1), -4.0 * w)
        np.add.at(H, (idx - 1, idx), -4.0 * w)
        return H

    return TestProblem("TRIDIA", n, np.ones(n), f, g, h)


_SET38_BUILDERS = [
    _arwhead,
    _cosine,
    _dixon3dq,
    _dqrtic,
    _engval1,
    _freuroth,
    _nondia,
    _nondquar,
    _power,
    lambda n: _dqrtic(n, name="QUARTC"),
    _sinquad,
    _tridia,
]


# ---------------------------------------------------------------------------
# SET53: fixed conventional dimensions
# ---------------------------------------------------------------------------


def _bard():
    y = np.array([0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39,
                  0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39])
    u = np.arange(1.0, 16.0)
    v = 16.0 - u
    w = np.minimum(u, v)

    def residuals(x):
        return y - (x[0] + u / (v * x[1] + w * x[2]))

    def jac(x):
        D = v * x[1] + w * x[2]
        J = np.empty((15, 3))
        J[:, 0] = -1.0
        J[:, 1] = u * v / D**2
        J[:, 2] = u * w / D**2
        return J

    def rhess(x, r):
        D = v * x[1] + w * x[2]
        c = -2.0 * r * u / D**3
        H = np.zeros((3, 3))
        H[1, 1] = np.sum(c * v * v)
        H[1, 2] = H[2, 1] = np.sum(c * v * w)
        H[2, 2] = np.sum(c * w * w)
        return H

    return _least_squares("BARD", np.ones(3), residuals, jac, rhess)


def _biggs6():
    t = 0.1 * np.arange(1.0, 14.0)
    y = np.exp(-t) - 5.0 * np.exp(-10.0 * t) + 3.0 * np.exp(-4.0 * t)

    def residuals(x):
        return (x[2] * np.exp(-t * x[0]) - x[3] * np.exp(-t * x[1])
                + x[5] * np.exp(-t * x[4]) - y)

    def jac(x):
        e1, e2, e3 = np.exp(-t * x[0]), np.exp(-t * x[1]), np.exp(-t * x[4])
        J = np.empty((13, 6))
        J[:, 0] = -t * x[2] * e1
        J[:, 1] = t * x[3] * e2
        J[:, 2] = e1
        J[:, 3] = -e2
        J[:, 4] = -t * x[5] * e3
        J[:, 5] = e3
        return J

    def rhess(x, r):
        e1, e2, e3 = np.exp(-t * x[0]), np.exp(-t * x[1]), np.exp(-t * x[4])
        H = np.zeros((6, 6))
        H[0, 0] = np.sum(r * t**2 * x[2] * e1)
        H[0, 2] = H[2, 0] = np.sum(-r * t * e1)
        H[1, 1] = np.sum(-r * t**2 * x[3] * e2)
        H[1, 3] = H[3, 1] = np.sum(r * t * e2)
        H[4, 4] = np.sum(r * t**2 * x[5] * e3)
        H[4, 5] = H[5, 4] = np.sum(-r * t * e3)
        return H

    return _least_squares("BIGGS6", np.array([1.0, 2.0, 1.0, 1.0, 1.0, 1.0]),
                          residuals, jac, rhess)


def _box3():
    t = 0.1 * np.arange(1.0, 11.0)
    c = np.exp(-t) - np.exp(-10.0 * t)

    def residuals(x):
        return np.exp(-t * x[0]) - np.exp(-t * x[1]) - x[2] * c

    def jac(x):
        J = np.empty((10, 3))
        J[:, 0] = -t * np.exp(-t * x[0])
        J[:, 1] = t * np.exp(-t * x[1])
        J[:, 2] = -c
        return J

    def rhess(x, r):
        H = np.zeros((3, 3))
        H[0, 0] = np.sum(r * t**2 * np.exp(-t * x[0]))
        H[1, 1] = np.sum(-r * t**2 * np.exp(-t * x[1]))
        return H

    return _least_squares("BOX3", np.array([0.0, 10.0, 20.0]),
                          residuals, jac, rhess)


def _brybnd(n=10, ml=5, mu=1):
    bands = [
        [j for j in range(max(0, i - ml), min(n, i + mu + 1)) if j != i]
        for i in range(n)
    ]

    def residuals(x):
        r = x * (2.0 + 5.0 * x**2) + 1.0
        for i, js in enumerate(bands):
            r[i] -= np.sum(x[js] * (1.0 + x[js]))
        return r

    def jac(x):
        J = np.zeros((n, n))
        for i, js in enumerate(bands):
            J[i, i] = 2.0 + 15.0 * x[i] ** 2
            J[i, js] = -(1.0 + 2.0 * x[js])
        return J

    def rhess(x, v):
        H = np.zeros((n, n))
        for i, js in enumerate(bands):
            H[i, i] += v[i] * 30.0 * x[i]
            for j in js:
                H[j, j] += -2.0 * v[i]
        return H

    return _least_squares("BRYBND", -np.ones(n), residuals, jac, rhess)


def _cube():
    def f(x):
        return float((x[0] - 1.0) ** 2 + 100.0 * (x[1] - x[0] ** 3) ** 2)

    def g(x):
        d = x[1] - x[0] ** 3
        return np.array([
            2.0 * (x[0] - 1.0) - 600.0 * x[0] ** 2 * d,
            200.0 * d,
        ])

    def h(x):
        d = x[1] - x[0] ** 3
        return np.array([
            [2.0 - 1200.0 * x[0] * d + 1800.0 * x[0] ** 4, -600.0 * x[0] ** 2],
            [-600.0 * x[0] ** 2, 200.0],
        ])

    return TestProblem("CUBE", 2, np.array([-1.2, 1.0]), f, g, h)


def _denschnd():
    def residuals(x):
        return np.array([
            x[0] ** 2 + x[1] ** 3 - x[2] ** 4,
            2.0 * x[0] * x[1] * x[2],
            2.0 * x[0] * x[1] - 3.0 * x[1] * x[2] + x[0] * x[2],
        ])

    def jac(x):
        return np.array([
            [2.0 * x[0], 3.0 * x[1] ** 2, -4.0 * x[2] ** 3],
            [2.0 * x[1] * x[2], 2.0 * x[0] * x[2], 2.0 * x[0] * x[1]],
            [2.0 * x[1] + x[2], 2.0 * x[0] - 3.0 * x[2], -3.0 * x[1] + x[0]],
        ])

    def rhess(x, v):
        H1 = np.diag([2.0, 6.0 * x[1], -12.0 * x[2] ** 2])
        H2 = np.array([
            [0.0, 2.0 * x[2], 2.0 * x[1]],
            [2.0 * x[2], 0.0, 2.0 * x[0]],
            [2.0 * x[1], 2.0 * x[0], 0.0],
        ])
        H3 = np.array([
            [0.0, 2.0, 1.0],
            [2.0, 0.0, -3.0],
            [1.0, -3.0, 0.0],
        ])
        return v[0] * H1 + v[1] * H2 + v[2] * H3

    return _least_squares("DENSCHND", 10.0 * np.ones(3), residuals, jac, rhess)


def _denschne():
    def residuals(x):
        return np.array([x[0], x[1] + x[1] ** 2, np.exp(x[2]) - 1.0])

    def jac(x):
        return np.diag([1.0, 1.0 + 2.0 * x[1], np.exp(x[2])])

    def rhess(x, v):
        return np.diag([0.0, 2.0 * v[1], v[2] * np.exp(x[2])])

    return _least_squares("DENSCHNE", np.array([2.0, 3.0, -8.0]),
                          residuals, jac, rhess)


_DIXMAAN_PARAMS = {
    # name suffix: (alpha, beta, gamma, delta, k1, k2, k3, k4)
    "A1": (1.0, 0.0, 0.125, 0.125, 0, 0, 0, 0),
    "B": (1.0, 0.0625, 0.0625, 0.0625, 0, 0, 0, 1),
    "C": (1.0, 0.125, 0.125, 0.125, 0, 0, 0, 0),
    "D": (1.0, 0.26, 0.26, 0.26, 0, 0, 0, 0),
    "E1": (1.0, 0.0, 0.125, 0.125, 1, 0, 0, 1),
    "F": (1.0, 0.0625, 0.0625, 0.0625, 1, 0, 0, 1),
    "G": (1.0, 0.125, 0.125, 0.125, 1, 0, 0, 1),
    "H": (1.0, 0.26, 0.26, 0.26, 1, 0, 0, 1),
    "I1": (1.0, 0.0, 0.125, 0.125, 2, 0, 0, 2),
    "J": (1.0, 0.0625, 0.0625, 0.0625, 2, 0, 0, 2),
    "K": (1.0, 0.125, 0.125, 0.125, 2, 0, 0, 2),
    "L": (1.0, 0.26, 0.26, 0.26, 2, 0, 0, 2),
}


def _dixmaan(suffix, n=15):
    # Dixon-Maany family; n must be divisible by 3
    al, be, ga, de, k1, k2, k3, k4 = _DIXMAAN_PARAMS[suffix]
    m = n // 3
    i1 = np.arange(1.0, n + 1.0)
    c1 = al * (i1 / n) ** k1
    c2 = be * (i1[:-1] / n) ** k2
    c3 = ga * (i1[: 2 * m] / n) ** k3
    c4 = de * (i1[:m] / n) ** k4

    def f(x):
        v = x[1:] + x[1:] ** 2
        t1 = np.sum(c1 * x**2)
        t2 = np.sum(c2 * x[:-1] ** 2 * v**2)
        t3 = np.sum(c3 * x[: 2 * m] ** 2 * x[m : 3 * m] ** 4)
        t4 = np.sum(c4 * x[:m] * x[2 * m :])
        return float(1.0 + t1 + t2 + t3 + t4)

    def g(x):
        out = 2.0 * c1 * x
        v = x[1:] + x[1:] ** 2
        vp = 1.0 + 2.0 * x[1:]
        out[:-1] += 2.0 * c2 * x[:-1] * v**2
        out[1:] += 2.0 * c2 * x[:-1] ** 2 * v * vp
        out[: 2 * m] += 2.0 * c3 * x[: 2 * m] * x[m : 3 * m] ** 4
        out[m : 3 * m] += 4.0 * c3 * x[: 2 * m] ** 2 * x[m : 3 * m] ** 3
        out[:m] += c4 * x[2 * m :]
        out[2 * m :] += c4 * x[:m]
        return out

    def h(x):
        H = np.diag(2.0 * c1 * np.ones(n))
        v = x[1:] + x[1:] ** 2
        vp = 1.0 + 2.0 * x[1:]
        idx = np.arange(n - 1)
        np.add.at(H, (idx, idx), 2.0 * c2 * v**2)
        cross = 4.0 * c2 * x[:-1] * v * vp
        np.add.at(H, (idx, idx + 1), cross)
        np.add.at(H, (idx + 1, idx), cross)
        np.add.at(H, (idx + 1, idx + 1),
                  2.0 * c2 * x[:-1] ** 2 * (vp**2 + 2.0 * v))
        ia = np.arange(2 * m)
        ib = np.arange(m, 3 * m)
        np.add.at(H, (ia, ia), 2.0 * c3 * x[m : 3 * m] ** 4)
        c = 8.0 * c3 * x[: 2 * m] * x[m : 3 * m] ** 3
        np.add.at(H, (ia, ib), c)
        np.add.at(H, (ib, ia), c)
        np.add.at(H, (ib, ib), 12.0 * c3 * x[: 2 * m] ** 2 * x[m : 3 * m] ** 2)
        ic = np.arange(m)
        np.add.at(H, (ic, ic + 2 * m), c4)
        np.add.at(H, (ic + 2 * m, ic), c4)
        return H

    return TestProblem(f"DIXMAAN{suffix}", n, 2.0 * np.ones(n), f, g, h)


def _engval2():
    def residuals(x):
        q = 5.0 * x[2] - x[0] + 1.0
        return np.array([
            x[0] ** 2 + x[1] ** 2 + x[2] ** 2 - 1.0,
            x[0] ** 2 + x[1] ** 2 + (x[2] - 2.0) ** 2 - 1.0,
            x[0] + x[1] + x[2] - 1.0,
            x[0] + x[1] - x[2] + 1.0,
            x[0] ** 3 + 3.0 * x[1] ** 2 + q**2 - 36.0,
        ])

    def jac(x):
        q = 5.0 * x[2] - x[0] + 1.0
        return np.array([
            [2.0 * x[0], 2.0 * x[1], 2.0 * x[2]],
            [2.0 * x[0], 2.0 * x[1], 2.0 * (x[2] - 2.0)],
            [1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0],
            [3.0 * x[0] ** 2 - 2.0 * q, 6.0 * x[1], 10.0 * q],
        ])

    def rhess(x, v):
        H = np.zeros((3, 3))
        H += v[0] * 2.0 * np.eye(3)
        H += v[1] * 2.0 * np.eye(3)
        H5 = np.array([
            [6.0 * x[0] + 2.0, 0.0, -10.0],
            [0.0, 6.0, 0.0],
            [-10.0, 0.0, 50.0],
        ])
        return H + v[4] * H5

    return _least_squares("ENGVAL2", np.array([1.0, 2.0, 0.0]),
                          residuals, jac, rhess)


def _himmelbg():
    # (2 x_1^2 + 3 x_2^2) exp(-x_1 - x_2)
    def parts(x):
        q = 2.0 * x[0] ** 2 + 3.0 * x[1] ** 2
        qg = np.array([4.0 * x[0], 6.0 * x[1]])
        qh = np.diag([4.0, 6.0])
        return q, qg, qh, np.exp(-x[0] - x[1])

    def f(x):
        q, _, _, E = parts(x)
        return float(q * E)

    def g(x):
        q, qg, _, E = parts(x)
        return E * (qg - q)

    def h(x):
        q, qg, qh, E = parts(x)
        return E * (qh - qg[:, None] - qg[None, :] + q)

    return TestProblem("HIMMELBG", 2, np.array([0.5, 0.5]), f, g, h)


def _kowosb():
    y = np.array([0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                  0.0456, 0.0342, 0.0323, 0.0235, 0.0246])
    u = np.array([4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1,
                  0.0833, 0.0714, 0.0625])

    def residuals(x):
        N = u * (u + x[1])
        D = u**2 + u * x[2] + x[3]
        return y - x[0] * N / D

    def jac(x):
        N = u * (u + x[1])
        D = u**2 + u * x[2] + x[3]
        J = np.empty((11, 4))
        J[:, 0] = -N / D
        J[:, 1] = -x[0] * u / D
        J[:, 2] = x[0] * N * u / D**2
        J[:, 3] = x[0] * N / D**2
        return J

    def rhess(x, r):
        N = u * (u + x[1])
        D = u**2 + u * x[2] + x[3]
        H = np.zeros((4, 4))
        H[0, 1] = H[1, 0] = np.sum(r * (-u / D))
        H[0, 2] = H[2, 0] = np.sum(r * (N * u / D**2))
        H[0, 3] = H[3, 0] = np.sum(r * (N / D**2))
        H[1, 2] = H[2, 1] = np.sum(r * (x[0] * u**2 / D**2))
        H[1, 3] = H[3, 1] = np.sum(r * (x[0] * u / D**2))
        H[2, 2] = np.sum(r * (-2.0 * x[0] * N * u**2 / D**3))
        H[2, 3] = H[3, 2] = np.sum(r * (-2.0 * x[0] * N * u / D**3))
        H[3, 3] = np.sum(r * (-2.0 * x[0] * N / D**3))
        return H

    return _least_squares("KOWOSB", np.array([0.25, 0.39, 0.415, 0.39]),
                          residuals, jac, rhess)


def _watson(n=12):
    t = np.arange(1.0, 30.0) / 29.0
    # r_i = a_i'x - (b_i'x)^2 - 1 with a_i, b_i fixed coefficient vectors
    B = t[:, None] ** np.arange(n)[None, :]
    A = np.zeros((29, n))
    A[:, 1:] = np.arange(1.0, n) * t[:, None] ** np.arange(n - 1)[None, :]

    def residuals(x):
        r = A @ x - (B @ x) ** 2 - 1.0
        return np.concatenate([r, [x[0], x[1] - x[0] ** 2 - 1.0]])

    def jac(x):
        J = np.zeros((31, n))
        J[:29] = A - 2.0 * (B @ x)[:, None] * B
        J[29, 0] = 1.0
        J[30, 0] = -2.0 * x[0]
        J[30, 1] = 1.0
        return J

    def rhess(x, v):
        H = -2.0 * (B * v[:29, None]).T @ B
        H[0, 0] += -2.0 * v[30]
        return H

    return _least_squares("WATSON", np.zeros(n), residuals, jac, rhess)


def _woods():
    def f(x):
        return float(
            100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2
            + 90.0 * (x[3] - x[2] ** 2) ** 2 + (1.0 - x[2]) ** 2
            + 10.1 * ((x[1] - 1.0) ** 2 + (x[3] - 1.0) ** 2)
            + 19.8 * (x[1] - 1.0) * (x[3] - 1.0)
        )

    def g(x):
        d1 = x[1] - x[0] ** 2
        d2 = x[3] - x[2] ** 2
        return np.array([
            -400.0 * x[0] * d1 - 2.0 * (1.0 - x[0]),
            200.0 * d1 + 20.2 * (x[1] - 1.0) + 19.8 * (x[3] - 1.0),
            -360.0 * x[2] * d2 - 2.0 * (1.0 - x[2]),
            180.0 * d2 + 20.2 * (x[3] - 1.0) + 19.8 * (x[1] - 1.0),
        ])

    def h(x):
        d1 = x[1] - x[0] ** 2
        d2 = x[3] - x[2] ** 2
        H = np.zeros((4, 4))
        H[0, 0] = -400.0 * d1 + 800.0 * x[0] ** 2 + 2.0
        H[0, 1] = H[1, 0] = -400.0 * x[0]
        H[1, 1] = 220.2
        H[1, 3] = H[3, 1] = 19.8
        H[2, 2] = -360.0 * d2 + 720.0 * x[2] ** 2 + 2.0
        H[2, 3] = H[3, 2] = -360.0 * x[2]
        H[3, 3] = 200.2
        return H

    return TestProblem("WOODS", 4, np.array([-3.0, -1.0, -3.0, -1.0]), f, g, h)


_SET53_BUILDERS = [
    _bard,
    _biggs6,
    _box3,
    _brybnd,
    _cube,
    _denschnd,
    _denschne,
] + [
    (lambda s: (lambda: _dixmaan(s)))(s) for s in _DIXMAAN_PARAMS
] + [
    _engval2,
    _himmelbg,
    _kowosb,
    _watson,
    _woods,
]


# ---------------------------------------------------------------------------
# SYNTHETIC: convex quadratics with known minimizers
# ---------------------------------------------------------------------------


def _quadratic(name, x0, Q, xstar):
    Q = np.asarray(Q, dtype=float)
    xstar = np.asarray(xstar, dtype=float)

    def f(x):
        d = x - xstar
        return float(0.5 * d @ Q @ d)

    def g(x):
        return Q @ (x - xstar)

    def h(x):
        return Q.copy()

    return TestProblem(name, len(x0), np.asarray(x0, dtype=float), f, g, h)


def _synthetic(n):
    tri = 2.0 * np.eye(n)
    tri -= np.eye(n, k=1)
    tri -= np.eye(n, k=-1)
    return [
        _quadratic("SPHERE", np.ones(n), np.eye(n), np.zeros(n)),
        _quadratic("DIAGQUAD", np.ones(n), np.diag(np.arange(1.0, n + 1.0)),
                   np.zeros(n)),
        _quadratic("TRIDIAGQUAD", np.zeros(n), tri, np.ones(n)),
    ]


def catalog(set_id: str, n: int | None = None) -> list[TestProblem]:
    """Return the catalog for one problem set, in deterministic order.

    ``n`` selects the dimension for SET38 and SYNTHETIC members and must be
    omitted for SET53, whose members carry fixed dimensions.
    """
    if set_id == SET38:
        if n is None:
            raise ValueError("SET38 requires a dimension n")
        if n < 2:
            raise ValueError("SET38 requires n >= 2")
        return [b(n) for b in _SET38_BUILDERS]
    if set_id == SET53:
        if n is not None:
            raise ValueError("SET53 members have fixed dimensions")
        return [b() for b in _SET53_BUILDERS]
    if set_id == SYNTHETIC:
        if n is None:
            raise ValueError("SYNTHETIC requires a dimension n")
        if n < 1:
            raise ValueError("SYNTHETIC requires n >= 1")
        return _synthetic(n)
    raise ValueError(f"unknown problem set {set_id!r}")


def get_problem(set_id: str, name: str, n: int | None = None) -> TestProblem:
    for p in catalog(set_id, n):
        if p.name == name:
            return p
    raise KeyError(f"{name} not in {set_id}")
