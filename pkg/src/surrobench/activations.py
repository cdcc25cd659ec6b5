"""Activation functions with first and second derivatives.

The conventions at non-smooth points are fixed once here: ReLU uses
s'(0) = 0 and s'' = 0 everywhere, and the ELU second derivative at the
origin takes the left-hand value alpha.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

RELU, ELU, SILU, SIGMOID, TANH = "relu", "elu", "silu", "sigmoid", "tanh"
ACTIVATION_KINDS = (RELU, ELU, SILU, SIGMOID, TANH)

# initialization families: He for the rectifier-like kinds, Xavier otherwise
HE_KINDS = (RELU, ELU, SILU)
XAVIER_KINDS = (SIGMOID, TANH)


@dataclass(frozen=True)
class Activation:
    kind: str
    alpha: float = 1.0  # ELU scale

    def __post_init__(self):
        if self.kind not in ACTIVATION_KINDS:
            raise ValueError(f"unknown activation {self.kind!r}")

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == RELU:
            return np.maximum(z, 0.0)
        if self.kind == ELU:
            return np.where(z > 0.0, z, self.alpha * np.expm1(np.minimum(z, 0.0)))
        if self.kind == SILU:
            return z * expit(z)
        if self.kind == SIGMOID:
            return expit(z)
        return np.tanh(z)

    def deriv(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == RELU:
            return np.where(z > 0.0, 1.0, 0.0)
        if self.kind == ELU:
            return np.where(z > 0.0, 1.0, self.alpha * np.exp(np.minimum(z, 0.0)))
        if self.kind == SILU:
            s = expit(z)
            return s * (1.0 + z * (1.0 - s))
        if self.kind == SIGMOID:
            s = expit(z)
            return s * (1.0 - s)
        return 1.0 - np.tanh(z) ** 2

    def second(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == RELU:
            return np.zeros_like(z)
        if self.kind == ELU:
            return np.where(z > 0.0, 0.0, self.alpha * np.exp(np.minimum(z, 0.0)))
        if self.kind == SILU:
            s = expit(z)
            return s * (1.0 - s) * (2.0 + z * (1.0 - 2.0 * s))
        if self.kind == SIGMOID:
            s = expit(z)
            return s * (1.0 - s) * (1.0 - 2.0 * s)
        t = np.tanh(z)
        return -2.0 * t * (1.0 - t**2)
