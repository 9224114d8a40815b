"""Vectorised truncated Taylor arithmetic (forward-mode jets).

A :class:`Taylor` holds coefficients ``c[k, i]`` of ``sum_k c[k, i] h^k``
for a batch of base points ``i``.  Maps push a Taylor through themselves,
so evaluating with order 0 is plain evaluation, order 1 gives slopes and
order K gives the truncated Taylor series used for jets.
"""

from __future__ import annotations

import numpy as np

from .series import _compose, _invert


class Taylor:
    __slots__ = ("c",)

    def __init__(self, c):
        c = np.asarray(c, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        self.c = c

    @classmethod
    def variable(cls, x, order: int) -> "Taylor":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        c = np.zeros((order + 1, x.size))
        c[0] = x
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, x, order: int) -> "Taylor":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        c = np.zeros((order + 1, x.size))
        c[0] = x
        return cls(c)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def __len__(self):
        return self.c.shape[1]

    def copy(self):
        return Taylor(self.c.copy())

    def take(self, mask) -> "Taylor":
        return Taylor(self.c[:, mask])

    def put(self, mask, other: "Taylor"):
        self.c[:, mask] = other.c

    # arithmetic --------------------------------------------------------
    def __add__(self, o):
        if isinstance(o, Taylor):
            return Taylor(self.c + o.c)
        c = self.c.copy()
        c[0] = c[0] + o
        return Taylor(c)

    __radd__ = __add__

    def __neg__(self):
        return Taylor(-self.c)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Taylor):
            a, b = self.c, o.c
            out = np.zeros_like(a)
            for k in range(a.shape[0]):
                out[k] = np.einsum("j...,j...->...", a[: k + 1], b[k::-1])
            return Taylor(out)
        return Taylor(self.c * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Taylor):
            return self * o.reciprocal()
        return Taylor(self.c / o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def __pow__(self, n: int):
        out = Taylor.constant(np.ones(len(self)), self.order)
        for _ in range(n):
            out = out * self
        return out

    def reciprocal(self) -> "Taylor":
        a = self.c
        r = np.zeros_like(a)
        r[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            r[k] = -np.einsum("j...,j...->...", a[1 : k + 1], r[k - 1 :: -1]) * r[0]
        return Taylor(r)

    def exp(self) -> "Taylor":
        u = self.c
        e = np.zeros_like(u)
        e[0] = np.exp(u[0])
        for k in range(1, u.shape[0]):
            j = np.arange(1, k + 1).reshape((-1,) + (1,) * (u.ndim - 1))
            e[k] = np.sum(j * u[1 : k + 1] * e[k - 1 :: -1], axis=0) / k
        return Taylor(e)

    def log(self) -> "Taylor":
        u = self.c
        y = np.zeros_like(u)
        y[0] = np.log(u[0])
        for k in range(1, u.shape[0]):
            acc = k * u[k]
            for j in range(1, k):
                acc = acc - j * y[j] * u[k - j]
            y[k] = acc / (k * u[0])
        return Taylor(y)

    def tanh(self) -> "Taylor":
        u = self.c
        y = np.zeros_like(u)
        y[0] = np.tanh(u[0])
        w = np.zeros_like(u)  # 1 - y^2
        w[0] = 1.0 - y[0] ** 2
        for k in range(1, u.shape[0]):
            acc = 0.0
            for j in range(1, k + 1):
                acc = acc + j * u[j] * w[k - j]
            y[k] = acc / k
            w[k] = -np.einsum("j...,j...->...", y[: k + 1], y[k::-1])
        return Taylor(y)

    def polyval(self, coeffs) -> "Taylor":
        """``sum_n coeffs[n] * self**n`` (Horner)."""
        out = Taylor.constant(np.full(len(self), float(coeffs[-1])), self.order)
        for a in coeffs[-2::-1]:
            out = out * self + float(a)
        return out

    def compose_outer(self, outer) -> "Taylor":
        """Evaluate a series given around ``self.value`` at ``self``.

        ``outer[k]`` (shape ``(K + 1, n)``) are the Taylor coefficients of the
        outer function at this Taylor's base values.
        """
        outer = np.asarray(outer, dtype=float)
        order = self.order
        h = [np.zeros(len(self))] + [self.c[k] for k in range(1, order + 1)]
        res = _compose([outer[k] for k in range(order + 1)], h, order)
        return Taylor(np.array(res))


def invert_jet(coeffs) -> np.ndarray:
    """Series reversion of jets ``coeffs[k]`` (k >= 1, ``coeffs[0]`` ignored)."""
    coeffs = np.asarray(coeffs, dtype=float)
    order = coeffs.shape[0] - 1
    a = [np.zeros_like(coeffs[0])] + [coeffs[k] for k in range(1, order + 1)]
    return np.array(_invert(a, order))
