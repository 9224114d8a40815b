"""Finite-difference oracles shared by the tests."""

import math

import numpy as np


def stencil_weights(offsets, k):
    """Weights ``w`` with ``sum w_i f(x0 + d_i) ~ f^(k)(x0)`` for offsets ``d``."""
    d = np.asarray(offsets, dtype=float)
    n = len(d)
    rhs = np.zeros(n)
    rhs[k] = math.factorial(k)
    return np.linalg.solve(np.vander(d, n, increasing=True).T, rhs)


def one_sided(f, x0, k, h, side, points=7):
    """k-th derivative from ``points`` samples on one side of ``x0``.

    Offsets are taken from the rounded sample positions so that the stencil
    matches the points actually evaluated.
    """
    s = 1.0 if side == "right" else -1.0
    x = x0 + s * h * np.arange(points)
    return float(stencil_weights((x - x0) / h, k) @ f(x)) / h ** k


def central(f, x0, k, h, points=9):
    half = points // 2
    x = x0 + h * np.arange(-half, half + 1)
    return float(stencil_weights((x - x0) / h, k) @ f(x)) / h ** k
