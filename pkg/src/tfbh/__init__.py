"""Reproducing-kernel collocation solver for the generalized
time-fractional Burgers-Huxley equation."""

__version__ = "0.1.0"
