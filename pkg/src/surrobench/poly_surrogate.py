"""Polynomial and radial-basis surrogate models.

Four basis families over normalized coordinates z = (x - y0) / Delta:

* ``natural``       -- quadratic monomials {1, z_i, z_i^2/2, z_i z_j},
* ``tilde_cross``   -- the natural basis with an activation applied to the
                       cross terms z_i z_j (i < j),
* ``hat_diagonal``  -- {1, z_i, s(z_i), z_i^2/2}, a 3n+1 element family
                       fitted by regression,
* ``rbf``           -- kernels centered at the sample points plus a linear
                       polynomial tail.

Determined interpolation solves M(phi, Y) alpha = f(Y) by LU with a
condition estimate; regression solves the least-squares problem by
column-pivoted QR. RBF interpolation solves the saddle-point system with
the polynomial side condition P' lambda = 0. All fits normalize their
sample set internally and the returned models map evaluation points
through the stored (base, Delta), so gradients pick up a 1/Delta factor
and Hessians 1/Delta^2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, lstsq, lu_factor, lu_solve

from .activations import Activation
from .sampling import SampleSet, shift_scale

NATURAL, TILDE_CROSS, HAT_DIAGONAL, RBF = (
    "natural",
    "tilde_cross",
    "hat_diagonal",
    "rbf",
)
BASIS_KINDS = (NATURAL, TILDE_CROSS, HAT_DIAGONAL, RBF)

GAUSSIAN, CUBIC, MULTIQUADRIC, INVERSE_MULTIQUADRIC = (
    "gaussian",
    "cubic",
    "multiquadric",
    "inverse_multiquadric",
)
RBF_KERNELS = (GAUSSIAN, CUBIC, MULTIQUADRIC, INVERSE_MULTIQUADRIC)

RCOND_LIMIT = 1e-14
RESIDUAL_TOL = 1e-8
DUP_CENTER_TOL = 1e-13


class PoisednessError(RuntimeError):
    """The sample set cannot support the requested fit."""


def _pairs(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


@dataclass(frozen=True)
class Basis:
    kind: str
    n: int
    activation: Activation | None = None
    rbf_kernel: str | None = None
    centers: np.ndarray | None = None  # normalized coordinates, rbf only
    rho_sq: float = 1.0

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind in (TILDE_CROSS, HAT_DIAGONAL) and self.activation is None:
            raise ValueError(f"{self.kind} basis needs an activation")
        if self.kind == RBF:
            if self.rbf_kernel not in RBF_KERNELS:
                raise ValueError(f"unknown rbf kernel {self.rbf_kernel!r}")
            if self.centers is None:
                raise ValueError("rbf basis needs centers")

    @property
    def size(self) -> int:
        if self.kind in (NATURAL, TILDE_CROSS):
            return (self.n + 1) * (self.n + 2) // 2
        if self.kind == HAT_DIAGONAL:
            return 3 * self.n + 1
        return self.centers.shape[0] + self.n + 1


# kernel profiles as functions of t = r^2, so gradients and Hessians of
# phi(x) = h_t(|x - c|^2) come out as 2 h_t' d and 2 h_t' I + 4 h_t'' d d'
def _kernel_t(kernel, t, rho_sq):
    if kernel == GAUSSIAN:
        return np.exp(-t / rho_sq)
    if kernel == CUBIC:
        return t**1.5
    if kernel == MULTIQUADRIC:
        return (t + rho_sq) ** 1.5
    return (t + rho_sq) ** -0.5


def _kernel_t_d1(kernel, t, rho_sq):
    if kernel == GAUSSIAN:
        return -np.exp(-t / rho_sq) / rho_sq
    if kernel == CUBIC:
        return 1.5 * np.sqrt(t)
    if kernel == MULTIQUADRIC:
        return 1.5 * (t + rho_sq) ** 0.5
    return -0.5 * (t + rho_sq) ** -1.5


def _kernel_t_d2(kernel, t, rho_sq):
    if kernel == GAUSSIAN:
        return np.exp(-t / rho_sq) / rho_sq**2
    if kernel == CUBIC:
        # the d d' term carries a factor t, so the t=0 singularity is removable
        with np.errstate(divide="ignore"):
            out = np.where(t > 0.0, 0.75 / np.sqrt(np.maximum(t, 1e-300)), 0.0)
        return out
    if kernel == MULTIQUADRIC:
        return 0.75 * (t + rho_sq) ** -0.5
    return 0.75 * (t + rho_sq) ** -2.5


def basis_matrix(b: Basis, Z: np.ndarray) -> np.ndarray:
    """Evaluate all basis elements at the rows of Z (normalized coords)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    m, n = Z.shape
    if n != b.n:
        raise ValueError(f"points have dimension {n}, basis has {b.n}")
    if b.kind == RBF:
        d2 = np.sum((Z[:, None, :] - b.centers[None, :, :]) ** 2, axis=2)
        M = np.empty((m, b.size))
        M[:, : b.centers.shape[0]] = _kernel_t(b.rbf_kernel, d2, b.rho_sq)
        M[:, b.centers.shape[0]] = 1.0
        M[:, b.centers.shape[0] + 1 :] = Z
        return M
    cols = [np.ones(m)] + [Z[:, i] for i in range(n)]
    if b.kind == HAT_DIAGONAL:
        cols += [b.activation.value(Z[:, i]) for i in range(n)]
        cols += [0.5 * Z[:, i] ** 2 for i in range(n)]
    else:
        for i, j in _pairs(n):
            if i == j:
                cols.append(0.5 * Z[:, i] ** 2)
            elif b.kind == TILDE_CROSS:
                cols.append(b.activation.value(Z[:, i] * Z[:, j]))
            else:
                cols.append(Z[:, i] * Z[:, j])
    return np.column_stack(cols)


def basis_eval(b: Basis, z) -> np.ndarray:
    return basis_matrix(b, np.asarray(z, dtype=float)[None, :])[0]


def basis_grad(b: Basis, z) -> np.ndarray:
    """Gradients of all basis elements at z; row j is grad phi_j(z)."""
    z = np.asarray(z, dtype=float)
    n = b.n
    G = np.zeros((b.size, n))
    if b.kind == RBF:
        d = z[None, :] - b.centers
        t = np.sum(d**2, axis=1)
        G[: len(t)] = 2.0 * _kernel_t_d1(b.rbf_kernel, t, b.rho_sq)[:, None] * d
        G[len(t) + 1 :] = np.eye(n)
        return G
    G[1 : n + 1] = np.eye(n)
    if b.kind == HAT_DIAGONAL:
        G[n + 1 : 2 * n + 1] = np.diag(b.activation.deriv(z))
        G[2 * n + 1 :] = np.diag(z)
        return G
    for k, (i, j) in enumerate(_pairs(n)):
        row = n + 1 + k
        if i == j:
            G[row, i] = z[i]
        elif b.kind == TILDE_CROSS:
            sp = float(b.activation.deriv(z[i] * z[j]))
            G[row, i] = sp * z[j]
            G[row, j] = sp * z[i]
        else:
            G[row, i] = z[j]
            G[row, j] = z[i]
    return G


def basis_hess(b: Basis, z, j: int) -> np.ndarray:
    """Hessian of basis element j at z."""
    z = np.asarray(z, dtype=float)
    n = b.n
    H = np.zeros((n, n))
    if b.kind == RBF:
        ncen = b.centers.shape[0]
        if j >= ncen:  # constant and linear tail
            return H
        d = z - b.centers[j]
        t = float(d @ d)
        H += 2.0 * _kernel_t_d1(b.rbf_kernel, t, b.rho_sq) * np.eye(n)
        H += 4.0 * _kernel_t_d2(b.rbf_kernel, t, b.rho_sq) * np.outer(d, d)
        return H
    if j == 0 or j <= n:
        return H
    k = j - n - 1
    if b.kind == HAT_DIAGONAL:
        if k < n:  # s(z_k)
            H[k, k] = float(b.activation.second(z[k]))
        else:  # z_i^2/2
            H[k - n, k - n] = 1.0
        return H
    i, jj = _pairs(n)[k]
    if i == jj:
        H[i, i] = 1.0
    elif b.kind == TILDE_CROSS:
        u = z[i] * z[jj]
        sp = float(b.activation.deriv(u))
        spp = float(b.activation.second(u))
        H[i, i] = spp * z[jj] ** 2
        H[jj, jj] = spp * z[i] ** 2
        H[i, jj] = H[jj, i] = spp * u + sp
    else:
        H[i, jj] = H[jj, i] = 1.0
    return H


@dataclass(frozen=True)
class PolyModel:
    """A fitted polynomial-family surrogate in original coordinates."""

    basis: Basis
    coeffs: np.ndarray
    base: np.ndarray
    delta: float
    fit_mode: str  # determined | regression

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.base) / self.delta

    def value(self, x) -> float:
        return float(basis_eval(self.basis, self._z(x)) @ self.coeffs)

    def gradient(self, x) -> np.ndarray:
        return (basis_grad(self.basis, self._z(x)).T @ self.coeffs) / self.delta

    def hessian(self, x) -> np.ndarray:
        z = self._z(x)
        H = np.zeros((self.basis.n, self.basis.n))
        for j, a in enumerate(self.coeffs):
            if a != 0.0:
                H += a * basis_hess(self.basis, z, j)
        H /= self.delta**2
        return 0.5 * (H + H.T)

    def to_dict(self) -> dict:
        b = self.basis
        return {
            "model": "poly",
            "kind": b.kind,
            "n": b.n,
            "activation": None if b.activation is None else b.activation.kind,
            "alpha": None if b.activation is None else b.activation.alpha,
            "coeffs": self.coeffs.tolist(),
            "base": self.base.tolist(),
            "delta": self.delta,
            "fit_mode": self.fit_mode,
        }

    @classmethod
    def from_dict(cls, d) -> "PolyModel":
        act = None
        if d["activation"] is not None:
            act = Activation(d["activation"], d["alpha"])
        basis = Basis(d["kind"], d["n"], activation=act)
        return cls(basis, np.array(d["coeffs"]), np.array(d["base"]),
                   float(d["delta"]), d["fit_mode"])


@dataclass(frozen=True)
class RbfModel:
    """A fitted RBF interpolant with a linear polynomial tail."""

    kernel: str
    rho_sq: float
    centers: np.ndarray  # normalized coordinates
    lam: np.ndarray
    gamma: np.ndarray  # (n+1,): constant then linear coefficients
    base: np.ndarray
    delta: float

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.base) / self.delta

    def value(self, x) -> float:
        z = self._z(x)
        t = np.sum((z[None, :] - self.centers) ** 2, axis=1)
        return float(
            self.lam @ _kernel_t(self.kernel, t, self.rho_sq)
            + self.gamma[0] + self.gamma[1:] @ z
        )

    def gradient(self, x) -> np.ndarray:
        z = self._z(x)
        d = z[None, :] - self.centers
        t = np.sum(d**2, axis=1)
        g = 2.0 * (self.lam * _kernel_t_d1(self.kernel, t, self.rho_sq)) @ d
        return (g + self.gamma[1:]) / self.delta

    def hessian(self, x) -> np.ndarray:
        z = self._z(x)
        d = z[None, :] - self.centers
        t = np.sum(d**2, axis=1)
        n = self.centers.shape[1]
        h1 = _kernel_t_d1(self.kernel, t, self.rho_sq)
        h2 = _kernel_t_d2(self.kernel, t, self.rho_sq)
        H = 2.0 * np.sum(self.lam * h1) * np.eye(n)
        H += 4.0 * (d.T * (self.lam * h2)) @ d
        H /= self.delta**2
        return 0.5 * (H + H.T)

    def to_dict(self) -> dict:
        return {
            "model": "rbf",
            "kernel": self.kernel,
            "rho_sq": self.rho_sq,
            "centers": self.centers.tolist(),
            "lam": self.lam.tolist(),
            "gamma": self.gamma.tolist(),
            "base": self.base.tolist(),
            "delta": self.delta,
        }

    @classmethod
    def from_dict(cls, d) -> "RbfModel":
        return cls(d["kernel"], float(d["rho_sq"]), np.array(d["centers"]),
                   np.array(d["lam"]), np.array(d["gamma"]),
                   np.array(d["base"]), float(d["delta"]))


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    return PolyModel.from_dict(d) if d["model"] == "poly" else RbfModel.from_dict(d)


def _refined_solve(A, rhs):
    """LU solve with a condition estimate and two refinement sweeps."""
    lu, piv = lu_factor(A)
    diag = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or np.min(diag) == 0.0:
        raise PoisednessError("singular system matrix")
    gecon = get_lapack_funcs("gecon", (A,))
    rcond, _ = gecon(lu, np.linalg.norm(A, 1))
    if rcond < RCOND_LIMIT:
        raise PoisednessError(f"condition estimate {1.0 / max(rcond, 1e-300):.2e}")
    x = lu_solve((lu, piv), rhs)
    for _ in range(2):
        x += lu_solve((lu, piv), rhs - A @ x)
    return x


def fit_interpolation(b: Basis, Y: SampleSet, fY) -> PolyModel:
    """Determined interpolation: |Y| must equal the basis size."""
    norm = shift_scale(Y)
    fY = np.asarray(fY, dtype=float)
    if len(norm) != b.size:
        raise ValueError(f"interpolation needs exactly {b.size} points, got {len(norm)}")
    M = basis_matrix(b, norm.points)
    alpha = _refined_solve(M, fY)
    resid = np.max(np.abs(M @ alpha - fY))
    if resid > RESIDUAL_TOL * max(1.0, np.max(np.abs(fY))):
        raise PoisednessError(f"interpolation residual {resid:.2e}")
    return PolyModel(b, alpha, norm.base, norm.delta, "determined")


def fit_regression(b: Basis, Y: SampleSet, fY) -> PolyModel:
    """Least-squares fit on |Y| >= basis-size points (column-pivoted QR)."""
    norm = shift_scale(Y)
    fY = np.asarray(fY, dtype=float)
    if len(norm) < b.size:
        raise ValueError(f"regression needs at least {b.size} points, got {len(norm)}")
    M = basis_matrix(b, norm.points)
    alpha, _, rank, _ = lstsq(M, fY, cond=RCOND_LIMIT, lapack_driver="gelsy")
    if rank < b.size:
        raise PoisednessError(f"column rank {rank} < {b.size}")
    return PolyModel(b, alpha, norm.base, norm.delta, "regression")


def fit_rbf(Y: SampleSet, fY, kernel: str = GAUSSIAN, rho_sq: float = 1.0) -> RbfModel:
    """Interpolate with kernels at every sample point plus a linear tail."""
    if kernel not in RBF_KERNELS:
        raise ValueError(f"unknown rbf kernel {kernel!r}")
    norm = shift_scale(Y)
    fY = np.asarray(fY, dtype=float)
    Z = norm.points
    n1, n = Z.shape
    if n1 < n + 1:
        raise ValueError(f"rbf needs at least {n + 1} points, got {n1}")
    d2 = np.sum((Z[:, None, :] - Z[None, :, :]) ** 2, axis=2)
    off = d2 + np.diag(np.full(n1, np.inf))
    if float(np.min(off)) <= (10.0 * DUP_CENTER_TOL) ** 2:
        raise PoisednessError("duplicate interpolation centers")
    P = np.column_stack([np.ones(n1), Z])
    sv = np.linalg.svd(P, compute_uv=False)
    if sv[-1] <= RCOND_LIMIT * sv[0]:
        raise PoisednessError("affinely dependent centers")
    Phi = _kernel_t(kernel, d2, rho_sq)
    A = np.zeros((n1 + n + 1, n1 + n + 1))
    A[:n1, :n1] = Phi
    A[:n1, n1:] = P
    A[n1:, :n1] = P.T
    rhs = np.concatenate([fY, np.zeros(n + 1)])
    sol = _refined_solve(A, rhs)
    lam, gamma = sol[:n1], sol[n1:]
    resid = np.max(np.abs(Phi @ lam + P @ gamma - fY))
    if resid > RESIDUAL_TOL * max(1.0, np.max(np.abs(fY))):
        raise PoisednessError(f"interpolation residual {resid:.2e}")
    side = np.max(np.abs(P.T @ lam))
    if side > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(lam))) * n1):
        raise PoisednessError(f"side condition residual {side:.2e}")
    return RbfModel(kernel, rho_sq, Z.copy(), lam, gamma, norm.base, norm.delta)
