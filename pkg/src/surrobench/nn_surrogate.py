"""From-scratch feedforward network surrogate trained with Adam.

The architecture is fixed: two hidden layers of width 4n and a linear
output. Inputs pass through the shift-and-scale map z = (x - base) / Delta
stored on the weights, so a trained network approximates f in original
coordinates.

Reported losses are plain sums of squared residuals over a dataset;
minibatch gradient steps use the batch mean. The learning rate follows a
reduce-on-plateau schedule driven by the testing loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .activations import Activation, HE_KINDS
from .problems import SET38, SET53


@dataclass(frozen=True)
class MlpConfig:
    n: int
    activation: Activation

    @property
    def width(self) -> int:
        return 4 * self.n


class MlpWeights:
    """Weight matrices, biases, and the input normalization (base, Delta)."""

    def __init__(self, W1, b1, W2, b2, W3, b3, activation, base, delta):
        self.W1, self.b1 = W1, b1
        self.W2, self.b2 = W2, b2
        self.W3, self.b3 = W3, b3
        self.activation = activation
        self.base = np.asarray(base, dtype=float)
        self.delta = float(delta)

    @property
    def n(self) -> int:
        return self.W1.shape[1]

    @property
    def n_weights(self) -> int:
        return (self.W1.size + self.b1.size + self.W2.size + self.b2.size
                + self.W3.size + 1)

    def arrays(self) -> dict:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2,
                "W3": self.W3}

    def copy(self) -> "MlpWeights":
        return MlpWeights(self.W1.copy(), self.b1.copy(), self.W2.copy(),
                          self.b2.copy(), self.W3.copy(), self.b3,
                          self.activation, self.base.copy(), self.delta)

    def with_normalization(self, base, delta) -> "MlpWeights":
        out = self.copy()
        out.base = np.asarray(base, dtype=float).copy()
        out.delta = float(delta)
        return out

    def to_dict(self) -> dict:
        return {
            "activation": self.activation.kind,
            "alpha": self.activation.alpha,
            "base": self.base.tolist(),
            "delta": self.delta,
            "b3": self.b3,
            **{k: v.tolist() for k, v in self.arrays().items()},
        }

    @classmethod
    def from_dict(cls, d) -> "MlpWeights":
        act = Activation(d["activation"], d["alpha"])
        return cls(np.array(d["W1"]), np.array(d["b1"]), np.array(d["W2"]),
                   np.array(d["b2"]), np.array(d["W3"]), float(d["b3"]),
                   act, np.array(d["base"]), float(d["delta"]))


def init_weights(cfg: MlpConfig, seed) -> MlpWeights:
    """He-normal init for rectifier-like activations, Xavier-uniform otherwise.

    Biases start at zero; the normalization defaults to the identity map.
    """
    rng = np.random.default_rng(seed)
    w = cfg.width
    shapes = [(w, cfg.n), (w, w), (1, w)]
    mats = []
    for fan_out, fan_in in shapes:
        if cfg.activation.kind in HE_KINDS:
            mats.append(rng.normal(0.0, math.sqrt(2.0 / fan_in),
                                   size=(fan_out, fan_in)))
        else:
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            mats.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
    W1, W2, W3 = mats
    return MlpWeights(W1, np.zeros(w), W2, np.zeros(w), W3, 0.0,
                      cfg.activation, np.zeros(cfg.n), 1.0)


def _forward_cached(w: MlpWeights, Z: np.ndarray):
    """Batch forward on normalized inputs, keeping the per-layer caches."""
    z1 = Z @ w.W1.T + w.b1
    h1 = w.activation.value(z1)
    z2 = h1 @ w.W2.T + w.b2
    h2 = w.activation.value(z2)
    out = h2 @ w.W3[0] + w.b3
    return out, (z1, h1, z2, h2)


def forward(w: MlpWeights, x) -> float:
    """Network value at a point in original coordinates."""
    z = (np.asarray(x, dtype=float) - w.base) / w.delta
    out, _ = _forward_cached(w, z[None, :])
    return float(out[0])


def forward_batch(w: MlpWeights, X) -> np.ndarray:
    Z = (np.atleast_2d(np.asarray(X, dtype=float)) - w.base) / w.delta
    out, _ = _forward_cached(w, Z)
    return out


def loss(w: MlpWeights, X, y) -> float:
    """Sum of squared residuals over the dataset."""
    r = forward_batch(w, X) - np.asarray(y, dtype=float)
    return float(r @ r)


def weight_gradient(w: MlpWeights, X, y) -> dict:
    """Gradient of the mean squared residual over the batch."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Z = (X - w.base) / w.delta
    return _weight_gradient_z(w, Z, np.asarray(y, dtype=float))


def _weight_gradient_z(w: MlpWeights, Z, y) -> dict:
    out, (z1, h1, z2, h2) = _forward_cached(w, Z)
    m = Z.shape[0]
    dout = 2.0 * (out - y) / m
    gW3 = (dout @ h2)[None, :]
    gb3 = float(np.sum(dout))
    dh2 = np.outer(dout, w.W3[0])
    dz2 = dh2 * w.activation.deriv(z2)
    gW2 = dz2.T @ h1
    gb2 = dz2.sum(axis=0)
    dh1 = dz2 @ w.W2
    dz1 = dh1 * w.activation.deriv(z1)
    gW1 = dz1.T @ Z
    gb1 = dz1.sum(axis=0)
    return {"W1": gW1, "b1": gb1, "W2": gW2, "b2": gb2, "W3": gW3, "b3": gb3}


class AdamState:
    """First and second moment accumulators with the shared step counter."""

    def __init__(self, w: MlpWeights, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in w.arrays().items()}
        self.m["b3"] = 0.0
        self.v = {k: np.zeros_like(v) for k, v in w.arrays().items()}
        self.v["b3"] = 0.0


def adam_step(w: MlpWeights, grads: dict, state: AdamState, lr: float) -> None:
    """One bias-corrected Adam update, applied to ``w`` in place."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for key in ("W1", "b1", "W2", "b2", "W3", "b3"):
        g = grads[key]
        state.m[key] = b1 * state.m[key] + (1.0 - b1) * g
        state.v[key] = b2 * state.v[key] + (1.0 - b2) * g * g
        mhat = state.m[key] / c1
        vhat = state.v[key] / c2
        upd = lr * mhat / (np.sqrt(vhat) + state.eps)
        if key == "b3":
            w.b3 -= float(upd)
        else:
            getattr(w, key)[...] -= upd


class PlateauSchedule:
    """Multiply the learning rate by ``factor`` after ``patience`` epochs
    without a strict improvement of the best-seen monitored loss."""

    def __init__(self, lr, factor=0.8, patience=15, min_improve_rel=1e-12):
        if not 0.0 < factor < 1.0:
            raise ValueError("factor must lie in (0, 1)")
        if patience < 1:
            raise ValueError("patience must be >= 1")
        self.lr = float(lr)
        self.factor = factor
        self.patience = patience
        self.min_improve_rel = min_improve_rel
        self.best = math.inf
        self.bad = 0

    def update(self, monitored: float) -> float:
        thresh = self.min_improve_rel * max(1.0, abs(self.best))
        if monitored < self.best - thresh or math.isinf(self.best):
            self.best = monitored
            self.bad = 0
        else:
            self.bad += 1
            if self.bad >= self.patience:
                self.lr *= self.factor
                self.bad = 0
        return self.lr


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 300
    lr: float = 1e-3
    batch_size: int = 16
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    plateau_factor: float = 0.8
    plateau_patience: int = 15
    min_improve_rel: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.batch_size <= 64:
            raise ValueError("batch_size must lie in [2, 64]")


@dataclass
class TrainTrace:
    """Per-epoch losses and learning rates, plus the pre-training losses."""

    train_loss: list = field(default_factory=list)
    test_loss: list = field(default_factory=list)
    lr: list = field(default_factory=list)
    initial_train_loss: float = math.nan
    initial_test_loss: float = math.nan

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "train_loss", "test_loss", "lr"])
            w.writerow([0, repr(self.initial_train_loss),
                        repr(self.initial_test_loss), ""])
            for i, (a, b, c) in enumerate(
                zip(self.train_loss, self.test_loss, self.lr), start=1
            ):
                w.writerow([i, repr(a), repr(b), repr(c)])


def _epoch_pass(w, state, Z, y, lr, batch_size, rng) -> None:
    m = Z.shape[0]
    perm = rng.permutation(m)
    for start in range(0, m, batch_size):
        idx = perm[start : start + batch_size]
        adam_step(w, _weight_gradient_z(w, Z[idx], y[idx]), state, lr)


def train_epochs(w: MlpWeights, state: AdamState, X, y, epochs: int,
                 lr: float, batch_size: int, rng) -> None:
    """Continue training ``w`` in place for a number of epochs (no schedule)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    Z = (X - w.base) / w.delta
    for _ in range(epochs):
        _epoch_pass(w, state, Z, y, lr, batch_size, rng)


def train(cfg: MlpConfig, train_set, test_set, tcfg: TrainConfig,
          base=None, delta=None) -> tuple[MlpWeights, TrainTrace]:
    """Train a fresh network on ``train_set`` and schedule on ``test_set``.

    Both sets are (X, y) pairs in original coordinates; ``base``/``delta``
    fix the normalization (defaults: first training point and the largest
    training distance to it).
    """
    Xtr, ytr = (np.atleast_2d(np.asarray(train_set[0], dtype=float)),
                np.asarray(train_set[1], dtype=float))
    Xte, yte = (np.atleast_2d(np.asarray(test_set[0], dtype=float)),
                np.asarray(test_set[1], dtype=float))
    if base is None:
        base = Xtr[0]
    base = np.asarray(base, dtype=float)
    if delta is None:
        delta = float(np.max(np.linalg.norm(Xtr - base, axis=1)))
    if delta <= 0.0:
        raise ValueError("training set has zero spread")

    w = init_weights(cfg, tcfg.seed).with_normalization(base, delta)
    state = AdamState(w, tcfg.beta1, tcfg.beta2, tcfg.eps)
    rng = np.random.default_rng([tcfg.seed, 0x5B])
    Ztr = (Xtr - base) / delta

    trace = TrainTrace()
    trace.initial_train_loss = loss(w, Xtr, ytr)
    trace.initial_test_loss = loss(w, Xte, yte)
    sched = PlateauSchedule(tcfg.lr, tcfg.plateau_factor,
                            tcfg.plateau_patience, tcfg.min_improve_rel)
    sched.best = trace.initial_test_loss
    lr = sched.lr
    for _ in range(tcfg.epochs):
        _epoch_pass(w, state, Ztr, ytr, lr, tcfg.batch_size, rng)
        tr_l = loss(w, Xtr, ytr)
        te_l = loss(w, Xte, yte)
        trace.train_loss.append(tr_l)
        trace.test_loss.append(te_l)
        trace.lr.append(lr)
        lr = sched.update(te_l)
    return w, trace


def input_gradient(w: MlpWeights, x) -> np.ndarray:
    """Analytic gradient of the network output with respect to its input."""
    z = (np.asarray(x, dtype=float) - w.base) / w.delta
    _, (z1, _, z2, _) = _forward_cached(w, z[None, :])
    d2 = w.activation.deriv(z2[0]) * w.W3[0]
    d1 = w.activation.deriv(z1[0]) * (w.W2.T @ d2)
    return (w.W1.T @ d1) / w.delta


def input_hessian(w: MlpWeights, x) -> np.ndarray:
    """Input Hessian via central differences of the analytic gradient."""
    x = np.asarray(x, dtype=float)
    n = x.size
    h = 1e-5 * max(1.0, float(np.max(np.abs(x))))
    H = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        H[:, i] = (input_gradient(w, x + e) - input_gradient(w, x - e)) / (2.0 * h)
    return 0.5 * (H + H.T)


def minibatch_size(set_id: str, value: int) -> int:
    """Minibatch rule: a fixed table for SET38 dimensions, and for SET53 the
    power of two closest to 5% of the dataset size (ties round up), clamped
    to [2, 64]."""
    if set_id == SET38:
        table = {20: 16, 40: 32, 60: 64}
        if value not in table:
            raise ValueError(f"no minibatch rule for SET38 dimension {value}")
        return table[value]
    if set_id == SET53:
        p = 0.05 * value
        if p <= 2.0:
            return 2
        lo = 2 ** math.floor(math.log2(p))
        hi = 2 * lo
        size = hi if (hi - p) <= (p - lo) else lo
        return min(64, max(2, size))
    raise ValueError(f"no minibatch rule for set {set_id!r}")
