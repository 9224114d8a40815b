"""Hot numeric kernels: bump maps, jet interpolants, their inverses, sup-norms.

Every kernel has two implementations with the same signature: a
vectorised numpy version and a scalar-loop version compiled with
``numba.njit``.  The numba path is used when numba imports and the
environment variable ``REVDIFF_NO_NUMBA`` is unset (or "0").  Both are
exposed as ``numpy_kernels`` / ``numba_kernels`` for benchmarking.

Kernels take and return 1-D float64 arrays.
"""

from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and os.environ.get("REVDIFF_NO_NUMBA", "0").lower() in ("", "0", "false", "no")

# max |d/dx exp(-1/(x(1-x)))| on (0, 1), attained at x = 0.30334...
BUMP_SLOPE = 0.07757846043434821836670716027049026786496
# max of the normalised bump exp(-1/(x(1-x))) / BUMP_SLOPE, attained at 1/2
BUMP_HEIGHT = 0.2360918067487821318109121093014116227481

_NEWTON_ITERS = 100
_XTOL = 4.0 * np.finfo(float).eps


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

# exp(-1/q) underflows to 0 below this q, and so do all its derivatives
_Q_MIN = 1.0 / 745.0


def _bump_np(x, s):
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0) & (x * (1.0 - x) > _Q_MIN)
    xi = np.where(inside, x, 0.5)
    q = xi * (1.0 - xi)
    b = np.where(inside, np.exp(-1.0 / q) / BUMP_SLOPE, 0.0)
    db = b * (1.0 - 2.0 * xi) / (q * q)
    return x + s * b, 1.0 + s * db


def _safeguarded_newton_np(fun, y, lo, hi, x0):
    """Vectorised Newton iteration kept inside shrinking brackets [lo, hi].

    ``fun(x)`` returns (value, slope) of an increasing function.
    """
    x = np.clip(x0, lo, hi)
    lo = lo.copy()
    hi = hi.copy()
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_NEWTON_ITERS):
        if not active.any():
            break
        xa = x[active]
        fa, sa = fun(xa)
        r = fa - y[active]
        la, ha = lo[active], hi[active]
        la = np.where(r < 0, xa, la)
        ha = np.where(r > 0, xa, ha)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xa - r / sa
        bad = ~np.isfinite(xn) | (xn <= la) | (xn >= ha)
        xn = np.where(bad, 0.5 * (la + ha), xn)
        xn = np.where(r == 0, xa, xn)
        step = np.abs(xn - xa)
        lo[active], hi[active] = la, ha
        x[active] = xn
        done = (step <= _XTOL * (1.0 + np.abs(xn))) | (ha - la <= _XTOL * (1.0 + np.abs(xn)))
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return x


def _bump_inverse_np(y, s):
    y = np.asarray(y, dtype=float)
    out = y.copy()
    inside = (y > 0.0) & (y < 1.0)
    if inside.any() and s != 0.0:
        yi = y[inside]
        out[inside] = _safeguarded_newton_np(
            lambda x: _bump_np(x, s), yi, np.zeros_like(yi), np.ones_like(yi), yi
        )
    return out


def _step_np(t):
    """Smooth flat step: 1 for t <= 0, 0 for t >= 1; returns (value, d/dt)."""
    inside = (t > 0.0) & (t < 1.0)
    ti = np.where(inside, t, 0.5)
    g = -1.0 / ti + 1.0 / (1.0 - ti)
    th = np.tanh(0.5 * g)
    w = 1.0 - th * th
    chi = np.where(inside, 0.5 * (1.0 - th), np.where(t <= 0.0, 1.0, 0.0))
    with np.errstate(over="ignore", invalid="ignore"):
        d = -0.25 * w * (1.0 / (ti * ti) + 1.0 / ((1.0 - ti) ** 2))
    d = np.where(inside & (w > 0), d, 0.0)
    return chi, d


def _poly_np(c, h):
    p = np.zeros_like(h)
    dp = np.zeros_like(h)
    for n in range(len(c) - 1, 0, -1):
        dp = dp * h + n * c[n]
        p = (p + c[n]) * h
    return p, dp


def _bernstein_np(b, t):
    """de Casteljau evaluation of ``sum b_i B_{i,D}(t)`` and its t-derivative."""
    d = len(b) - 1
    w = np.repeat(np.asarray(b, dtype=float)[:, None], t.shape[0], axis=1)
    s = 1.0 - t
    for r in range(d, 1, -1):
        w[:r] = s * w[:r] + t * w[1 : r + 1]
    return s * w[0] + t * w[1], d * (w[1] - w[0])


def _jet_interp_np(x, prm, cu, cv):
    """Jet interpolant; see :class:`revdiff.smoothmap.JetInterp` for ``prm``."""
    u, v, delta, yu, yv, mu, mv, width = prm[:8]
    x = np.asarray(x, dtype=float)
    h = x - u
    t = np.clip(h / width, 0.0, 1.0)
    val, dv = _bernstein_np(prm[8:], t)
    sl = dv / width
    if delta > 0.0:
        chi, dchi = _step_np(h / delta)
        p, dp = _poly_np(cu, h)
        val = val + chi * p
        sl = sl + dchi / delta * p + chi * dp
        hv = x - v
        chi, dchi = _step_np(-hv / delta)
        p, dp = _poly_np(cv, hv)
        val = val + chi * p
        sl = sl - dchi / delta * p + chi * dp
    left = x < u
    right = x > v
    val = np.where(left, yu + mu * h, np.where(right, yv + mv * (x - v), val))
    sl = np.where(left, mu, np.where(right, mv, sl))
    return val, sl


def _jet_interp_inverse_np(y, prm, cu, cv):
    u, v, delta, yu, yv, mu, mv = prm[:7]
    y = np.asarray(y, dtype=float)
    sgn = 1.0 if mu > 0 else -1.0
    out = np.empty_like(y)
    below = sgn * (y - yu) < 0
    above = sgn * (y - yv) > 0
    out[below] = u + (y[below] - yu) / mu
    out[above] = v + (y[above] - yv) / mv
    mid = ~(below | above)
    if mid.any():
        ym = y[mid]
        guess = u + (ym - yu) * (v - u) / (yv - yu)

        def fun(x):
            f, s = _jet_interp_np(x, prm, cu, cv)
            return sgn * f, sgn * s

        out[mid] = _safeguarded_newton_np(
            fun, sgn * ym, np.full_like(ym, u), np.full_like(ym, v), guess
        )
    return out


def _sup_abs_error_np(a, b):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    d = np.where(np.isnan(d), np.inf, d)
    i = int(np.argmax(d))
    return float(d[i]), i


numpy_kernels = SimpleNamespace(
    bump=_bump_np,
    bump_inverse=_bump_inverse_np,
    jet_interp=_jet_interp_np,
    jet_interp_inverse=_jet_interp_inverse_np,
    sup_abs_error=_sup_abs_error_np,
)


# ---------------------------------------------------------------------------
# scalar-loop implementations (compiled with numba when available)
# ---------------------------------------------------------------------------

def _bump_scalar(x, s):
    q = x * (1.0 - x)
    if q <= _Q_MIN:
        return x, 1.0
    b = math.exp(-1.0 / q) / BUMP_SLOPE
    return x + s * b, 1.0 + s * b * (1.0 - 2.0 * x) / (q * q)


def _bump_loop(x, s):
    n = x.shape[0]
    val = np.empty(n)
    sl = np.empty(n)
    for i in range(n):
        val[i], sl[i] = _bump_scalar(x[i], s)
    return val, sl


def _bump_inverse_loop(y, s):
    n = y.shape[0]
    out = np.empty(n)
    for i in range(n):
        yi = y[i]
        if yi <= 0.0 or yi >= 1.0 or s == 0.0:
            out[i] = yi
            continue
        lo = 0.0
        hi = 1.0
        x = yi
        for _ in range(_NEWTON_ITERS):
            f, d = _bump_scalar(x, s)
            r = f - yi
            if r == 0.0:
                break
            if r < 0.0:
                lo = x
            else:
                hi = x
            xn = x - r / d
            if not (xn > lo and xn < hi):
                xn = 0.5 * (lo + hi)
            step = abs(xn - x)
            x = xn
            if step <= _XTOL * (1.0 + abs(x)) or hi - lo <= _XTOL * (1.0 + abs(x)):
                break
        out[i] = x
    return out


def _step_scalar(t):
    if t <= 0.0:
        return 1.0, 0.0
    if t >= 1.0:
        return 0.0, 0.0
    g = -1.0 / t + 1.0 / (1.0 - t)
    th = math.tanh(0.5 * g)
    w = 1.0 - th * th
    if w == 0.0:
        return 0.5 * (1.0 - th), 0.0
    return 0.5 * (1.0 - th), -0.25 * w * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)))


def _poly_scalar(c, h):
    p = 0.0
    dp = 0.0
    for n in range(c.shape[0] - 1, 0, -1):
        dp = dp * h + n * c[n]
        p = (p + c[n]) * h
    return p, dp


def _jet_interp_scalar(x, prm, cu, cv, work):
    u = prm[0]
    v = prm[1]
    delta = prm[2]
    if x < u:
        return prm[3] + prm[5] * (x - u), prm[5]
    if x > v:
        return prm[4] + prm[6] * (x - v), prm[6]
    width = prm[7]
    h = x - u
    t = h / width
    s = 1.0 - t
    d = prm.shape[0] - 9
    for i in range(d + 1):
        work[i] = prm[8 + i]
    for r in range(d, 1, -1):
        for i in range(r):
            work[i] = s * work[i] + t * work[i + 1]
    val = s * work[0] + t * work[1]
    sl = d * (work[1] - work[0]) / width
    if delta > 0.0:
        if h < delta:
            chi, dchi = _step_scalar(h / delta)
            p, dp = _poly_scalar(cu, h)
            val += chi * p
            sl += dchi / delta * p + chi * dp
        hv = x - v
        if -hv < delta:
            chi, dchi = _step_scalar(-hv / delta)
            p, dp = _poly_scalar(cv, hv)
            val += chi * p
            sl += -dchi / delta * p + chi * dp
    return val, sl


def _jet_interp_loop(x, prm, cu, cv):
    n = x.shape[0]
    val = np.empty(n)
    sl = np.empty(n)
    work = np.empty(prm.shape[0] - 8)
    for i in range(n):
        val[i], sl[i] = _jet_interp_scalar(x[i], prm, cu, cv, work)
    return val, sl


def _jet_interp_inverse_loop(y, prm, cu, cv):
    u = prm[0]
    v = prm[1]
    yu = prm[3]
    yv = prm[4]
    mu = prm[5]
    mv = prm[6]
    sgn = 1.0 if mu > 0 else -1.0
    n = y.shape[0]
    out = np.empty(n)
    work = np.empty(prm.shape[0] - 8)
    for i in range(n):
        yi = y[i]
        if sgn * (yi - yu) < 0.0:
            out[i] = u + (yi - yu) / mu
            continue
        if sgn * (yi - yv) > 0.0:
            out[i] = v + (yi - yv) / mv
            continue
        lo = u
        hi = v
        x = u + (yi - yu) * (v - u) / (yv - yu)
        for _ in range(_NEWTON_ITERS):
            f, d = _jet_interp_scalar(x, prm, cu, cv, work)
            r = sgn * (f - yi)
            if r == 0.0:
                break
            if r < 0.0:
                lo = x
            else:
                hi = x
            xn = x - r / (sgn * d)
            if not (xn > lo and xn < hi):
                xn = 0.5 * (lo + hi)
            step = abs(xn - x)
            x = xn
            if step <= _XTOL * (1.0 + abs(x)) or hi - lo <= _XTOL * (1.0 + abs(x)):
                break
        out[i] = x
    return out


def _sup_abs_error_loop(a, b):
    best = -1.0
    idx = 0
    for i in range(a.shape[0]):
        d = abs(a[i] - b[i])
        if d != d:
            d = math.inf
        if d > best:
            best = d
            idx = i
    return best, idx


if _HAVE_NUMBA:
    _jit = numba.njit(cache=True)
    _bump_scalar = _jit(_bump_scalar)
    _step_scalar = _jit(_step_scalar)
    _poly_scalar = _jit(_poly_scalar)
    _jet_interp_scalar = _jit(_jet_interp_scalar)
    _bump_loop = _jit(_bump_loop)
    _bump_inverse_loop = _jit(_bump_inverse_loop)
    _jet_interp_loop = _jit(_jet_interp_loop)
    _jet_interp_inverse_loop = _jit(_jet_interp_inverse_loop)
    _sup_abs_error_loop = _jit(_sup_abs_error_loop)


def _f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def _sup_loop_wrapper(a, b):
    d, i = _sup_abs_error_loop(_f64(a), _f64(b))
    return float(d), int(i)


numba_kernels = SimpleNamespace(
    bump=lambda x, s: _bump_loop(_f64(x), float(s)),
    bump_inverse=lambda y, s: _bump_inverse_loop(_f64(y), float(s)),
    jet_interp=lambda x, prm, cu, cv: _jet_interp_loop(_f64(x), _f64(prm), _f64(cu), _f64(cv)),
    jet_interp_inverse=lambda y, prm, cu, cv: _jet_interp_inverse_loop(_f64(y), _f64(prm), _f64(cu), _f64(cv)),
    sup_abs_error=_sup_loop_wrapper,
)

active = numba_kernels if NUMBA_ENABLED else numpy_kernels

bump = active.bump
bump_inverse = active.bump_inverse
jet_interp = active.jet_interp
jet_interp_inverse = active.jet_interp_inverse
sup_abs_error = active.sup_abs_error
safeguarded_newton = _safeguarded_newton_np
