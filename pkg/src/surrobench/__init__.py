"""Surrogate models and a full-low evaluation solver for derivative-free optimization."""

__version__ = "0.1.0"
