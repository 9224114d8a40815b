"""Smooth diffeomorphisms of the real line as expression trees.

Leaves carry closed forms (affine maps, the flat bump family, jet
interpolants, a smooth minimum) and interior nodes compose, glue, lift
periodically or extend from a fundamental domain.  Every node evaluates on
numpy arrays, pushes truncated Taylor series through itself (so jets of
composites are exact series compositions of the factors' jets) and knows
its inverse as another tree.  Inverses are pushed down to the leaves, so
numeric root finding only ever happens on a leaf.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .series import Series
from .taylor import Taylor, invert_jet

SMOOTHNESS_ORDER = 8
JET_TOL = 1e-7
INVERSION_TOL = 1e-12
GRID_POINTS = 2001

# beyond this the flat factors exp(-1/t) are exactly 0 in double precision
_FLAT_CUT = 700.0


class MonotonicityError(ValueError):
    """A constructed interpolant failed the strict monotonicity check."""


class OrbitError(RuntimeError):
    """Orbit search for a fundamental-domain extension did not terminate."""


def _flip(side: str) -> str:
    return "left" if side == "right" else "right"


class MapExpr:
    """Base class: a strictly monotone smooth bijection of R."""

    tag = "MapExpr"
    orientation = 1

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self._eval(arr.ravel().copy())
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _slope(self, x: np.ndarray) -> np.ndarray:
        return self._taylor(Taylor.variable(x, 1), "right").c[1]

    def _taylor(self, t: Taylor, side: str) -> Taylor:
        raise NotImplementedError

    def _inverse(self) -> "MapExpr":
        return Inverse(self)

    # numeric inverse for leaves: bracket by doubling, then safeguarded Newton
    def _inv_eval(self, y: np.ndarray) -> np.ndarray:
        sgn = float(self.orientation)
        lo = y - 1.0
        hi = y + 1.0
        if sgn < 0:
            lo, hi = -hi, -lo
        width = 1.0
        for _ in range(200):
            flo = sgn * self._eval(lo.copy())
            fhi = sgn * self._eval(hi.copy())
            bad_lo = flo > sgn * y
            bad_hi = fhi < sgn * y
            if not (bad_lo.any() or bad_hi.any()):
                break
            width *= 2.0
            lo = np.where(bad_lo, lo - width, lo)
            hi = np.where(bad_hi, hi + width, hi)
        else:
            raise ValueError(f"could not bracket inverse of {self.tag}")

        def fun(x):
            return sgn * self._eval(x.copy()), sgn * self._slope(x.copy())

        return _kernels.safeguarded_newton(fun, sgn * y, lo, hi, 0.5 * (lo + hi))

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{self.tag}(...)"


# ---------------------------------------------------------------------------
# leaves
# ---------------------------------------------------------------------------

class Identity(MapExpr):
    tag = "Identity"

    def _eval(self, x):
        return x

    def _slope(self, x):
        return np.ones_like(x)

    def _taylor(self, t, side):
        return t

    def _inverse(self):
        return self

    def to_dict(self):
        return {"tag": self.tag}

    def __repr__(self):
        return "Identity()"


class Affine(MapExpr):
    tag = "Affine"

    def __init__(self, slope: float, offset: float = 0.0):
        if slope == 0:
            raise ValueError("affine slope must be non-zero")
        self.slope = float(slope)
        self.offset = float(offset)
        self.orientation = 1 if slope > 0 else -1

    def _eval(self, x):
        return self.slope * x + self.offset

    def _slope(self, x):
        return np.full_like(x, self.slope)

    def _taylor(self, t, side):
        return t * self.slope + self.offset

    def _inverse(self):
        if abs(self.slope) == 1.0:
            return Affine(self.slope, -self.offset * self.slope)
        return Affine(1.0 / self.slope, -self.offset / self.slope)

    def to_dict(self):
        return {"tag": self.tag, "slope": self.slope, "offset": self.offset}

    def __repr__(self):
        return f"Affine({self.slope!r}, {self.offset!r})"


def Negate() -> Affine:
    return Affine(-1.0, 0.0)


def Translate(c: float) -> Affine:
    return Affine(1.0, c)


def _flat_exp_taylor(q: Taylor) -> Taylor:
    """``exp(-1/q)`` for q > 0, zero series where it underflows or q <= 0."""
    live = q.value > 1.0 / _FLAT_CUT
    out = Taylor(np.zeros_like(q.c))
    if live.any():
        out.put(live, (-(q.take(live).reciprocal())).exp())
    return out


class BumpSeed(MapExpr):
    """``x + s*B(x)`` with ``B`` the flat bump on [0, 1] scaled to max slope 1.

    ``B`` and all its derivatives vanish at 0 and 1, so the map is a
    diffeomorphism of R for ``|s| < 1`` that is the identity off (0, 1),
    with jets equal to ``X`` at both ends.
    """

    tag = "BumpSeed"

    def __init__(self, amplitude: float):
        if not abs(amplitude) < 1.0:
            raise ValueError(f"bump amplitude {amplitude} outside the admissible range |s| < 1")
        self.amplitude = float(amplitude)

    def _eval(self, x):
        return _kernels.bump(x, self.amplitude)[0]

    def _slope(self, x):
        return _kernels.bump(x, self.amplitude)[1]

    def _inv_eval(self, y):
        return _kernels.bump_inverse(y, self.amplitude)

    def _taylor(self, t, side):
        return t + _flat_exp_taylor(t * (1.0 - t)) * (self.amplitude / _kernels.BUMP_SLOPE)

    def to_dict(self):
        return {"tag": self.tag, "amplitude": self.amplitude}

    def __repr__(self):
        return f"BumpSeed({self.amplitude!r})"


def _step_taylor(s: Taylor) -> Taylor:
    """Flat step: 1 for s <= 0, 0 for s >= 1, smooth in between."""
    c0 = s.value
    out = Taylor(np.zeros_like(s.c))
    out.c[0] = np.where(c0 <= 0.5, 1.0, 0.0)
    live = (c0 > 1.0 / _FLAT_CUT) & (c0 < 1.0 - 1.0 / _FLAT_CUT)
    if live.any():
        si = s.take(live)
        g = (1.0 - si).reciprocal() - si.reciprocal()
        out.put(live, (1.0 - (g * 0.5).tanh()) * 0.5)
    return out


def _bernstein_from_jets(ju: Sequence[float], jv: Sequence[float]) -> list[float]:
    """Bernstein coefficients of the degree ``2K+1`` polynomial on [0, 1] whose
    Taylor coefficients are ``ju[n]`` at 0 and ``jv[n]`` at 1 (n = 0..K).

    The first ``K+1`` coefficients depend only on the jet at 0 and the last
    ``K+1`` only on the jet at 1:
    ``b_i = sum_{j<=i} C(i, j)/C(D, j) * a_j``.  Computed in exact rationals.
    """
    k = len(ju) - 1
    d = 2 * k + 1
    lo = [Fraction(c) for c in ju]
    hi = [Fraction(c) * (-1) ** n for n, c in enumerate(jv)]  # jet of p(1 - s) in s

    def side(a):
        return [sum(Fraction(math.comb(i, j), math.comb(d, j)) * a[j] for j in range(i + 1)) for i in range(k + 1)]

    return [float(c) for c in side(lo) + side(hi)[::-1]]


def _bernstein_taylor(b: np.ndarray, t: Taylor) -> Taylor:
    s = 1.0 - t
    w = [Taylor.constant(np.full(len(t), c), t.order) for c in b]
    for r in range(len(b) - 1, 0, -1):
        w = [s * w[i] + t * w[i + 1] for i in range(r)]
    return w[0]


class JetInterp(MapExpr):
    """Monotone map of [u, v] with prescribed endpoint values and jets.

    The base is a polynomial in ``t = (x - u)/(v - u)``, held in Bernstein
    form for stable evaluation.  With
    ``base="hermite"`` it is the two-point Hermite polynomial matching both
    jets in full, and no cutoffs are needed.  With ``base="cubic"`` it
    matches values and slopes only, and polynomial corrections for the
    higher jet coefficients are switched on by flat cutoffs supported
    within ``delta`` of each endpoint.  Outside [u, v] the map continues
    affinely with the endpoint slopes.
    """

    tag = "JetInterp"
    BASES = ("hermite", "cubic")

    def __init__(self, u, v, yu, yv, jet_u: Sequence[float], jet_v: Sequence[float],
                 delta: float = 0.0, base: str = "cubic"):
        if not v > u:
            raise ValueError("JetInterp needs u < v")
        if len(jet_u) != len(jet_v):
            raise ValueError("endpoint jets must have equal order")
        if base not in self.BASES:
            raise ValueError(f"unknown base {base!r}")
        self.u, self.v, self.yu, self.yv = float(u), float(v), float(yu), float(yv)
        self.jet_u = tuple(float(c) for c in jet_u)
        self.jet_v = tuple(float(c) for c in jet_v)
        self.base = base
        self.delta = 0.0 if base == "hermite" else float(delta)
        if base == "cubic" and not self.delta > 0:
            raise ValueError("cubic base needs a positive cutoff radius")
        mu, mv = self.jet_u[0], self.jet_v[0]
        if mu == 0 or mv == 0 or (mu > 0) != (mv > 0) or (self.yv > self.yu) != (mu > 0):
            raise ValueError("endpoint slopes and values must describe one orientation")
        self.orientation = 1 if mu > 0 else -1
        w = self.v - self.u
        k = len(self.jet_u)
        # Taylor coefficients in the normalised variable t
        nu = [self.yu] + [c * w ** n for n, c in enumerate(self.jet_u, start=1)]
        nv = [self.yv] + [c * w ** n for n, c in enumerate(self.jet_v, start=1)]
        cu = np.zeros(k + 1)
        cv = np.zeros(k + 1)
        if base == "hermite":
            bern = _bernstein_from_jets(nu, nv)
        else:
            dy = self.yv - self.yu
            a = [self.yu, nu[1], 3.0 * dy - 2.0 * nu[1] - nv[1], nu[1] + nv[1] - 2.0 * dy]
            at_v = [sum(math.comb(j, n) * a[j] for j in range(n, 4)) for n in range(4)]
            for n in range(2, k + 1):
                cu[n] = self.jet_u[n - 1] - (a[n] / w ** n if n < 4 else 0.0)
                cv[n] = self.jet_v[n - 1] - (at_v[n] / w ** n if n < 4 else 0.0)
            bern = [self.yu, self.yu + nu[1] / 3.0, self.yv - nv[1] / 3.0, self.yv]
        self._bern = np.array(bern)
        self._prm = np.array([self.u, self.v, self.delta, self.yu, self.yv, mu, mv, w] + list(bern))
        self._cu, self._cv = cu, cv

    def _eval(self, x):
        return _kernels.jet_interp(x, self._prm, self._cu, self._cv)[0]

    def _slope(self, x):
        return _kernels.jet_interp(x, self._prm, self._cu, self._cv)[1]

    def _inv_eval(self, y):
        return _kernels.jet_interp_inverse(y, self._prm, self._cu, self._cv)

    def _taylor(self, t, side):
        u, v, delta = self.u, self.v, self.delta
        c0 = t.value
        if side == "right":
            inner = (c0 >= u) & (c0 < v)
        else:
            inner = (c0 > u) & (c0 <= v)
        left = c0 < u if side == "right" else c0 <= u
        mu, mv = self._prm[5], self._prm[6]
        out = Taylor(np.zeros_like(t.c))
        if left.any():
            tl = t.take(left)
            out.put(left, (tl - u) * mu + self.yu)
        right = ~(inner | left)
        if right.any():
            tr = t.take(right)
            out.put(right, (tr - v) * mv + self.yv)
        if inner.any():
            ti = t.take(inner)
            h = ti - u
            val = _bernstein_taylor(self._bern, h * (1.0 / (v - u)))
            if delta > 0:
                val = val + _step_taylor(h * (1.0 / delta)) * h.polyval(self._cu)
                hv = ti - v
                val = val + _step_taylor(hv * (-1.0 / delta)) * hv.polyval(self._cv)
            out.put(inner, val)
        return out

    def to_dict(self):
        return {
            "tag": self.tag, "u": self.u, "v": self.v, "yu": self.yu, "yv": self.yv,
            "jet_u": list(self.jet_u), "jet_v": list(self.jet_v), "delta": self.delta,
            "base": self.base,
        }

    def __repr__(self):
        return (f"JetInterp([{self.u!r}, {self.v!r}] -> [{self.yu!r}, {self.yv!r}], "
                f"base={self.base!r}, delta={self.delta!r})")


class SoftMin(MapExpr):
    """Smooth minimum ``-eps*log(exp(-a/eps) + exp(-b/eps))`` of two increasing maps.

    Its slope is a convex combination of the slopes of ``a`` and ``b``, so
    it is increasing, and it lies below ``min(a, b)`` everywhere.
    """

    tag = "SoftMin"

    def __init__(self, a: MapExpr, b: MapExpr, eps: float = 0.5):
        if a.orientation < 0 or b.orientation < 0:
            raise ValueError("SoftMin needs order preserving arguments")
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.a, self.b, self.eps = a, b, float(eps)

    def _parts(self, x):
        fa = self.a._eval(x.copy())
        fb = self.b._eval(x.copy())
        return fa, fb

    def _eval(self, x):
        fa, fb = self._parts(x)
        return np.minimum(fa, fb) - self.eps * np.log1p(np.exp(-np.abs(fa - fb) / self.eps))

    def _slope(self, x):
        fa, fb = self._parts(x)
        wa = 0.5 * (1.0 - np.tanh(0.5 * (fa - fb) / self.eps))
        return wa * self.a._slope(x.copy()) + (1.0 - wa) * self.b._slope(x.copy())

    def _inv_eval(self, y):
        ia = inverse(self.a)
        ib = inverse(self.b)
        lift = self.eps * math.log(2.0)
        lo = np.minimum(ia._eval(y.copy()), ib._eval(y.copy()))
        hi = np.maximum(ia._eval(y + lift), ib._eval(y + lift))
        fun = lambda x: (self._eval(x.copy()), self._slope(x.copy()))
        return _kernels.safeguarded_newton(fun, y, lo, hi, 0.5 * (lo + hi))

    def _taylor(self, t, side):
        ta = self.a._taylor(t.copy(), side)
        tb = self.b._taylor(t.copy(), side)
        d = ta - tb
        a_low = d.value <= 0
        # min - eps*log(1 + exp(-|a-b|/eps))
        lo = Taylor(np.where(a_low, ta.c, tb.c))
        gap = Taylor(np.where(a_low, -d.c, d.c))
        return lo - ((gap * (-1.0 / self.eps)).exp() + 1.0).log() * self.eps

    def to_dict(self):
        return {"tag": self.tag, "a": self.a.to_dict(), "b": self.b.to_dict(), "eps": self.eps}


# ---------------------------------------------------------------------------
# interior nodes
# ---------------------------------------------------------------------------

class Inverse(MapExpr):
    """Inverse of a leaf, evaluated by the leaf's monotone root finder."""

    tag = "Inverse"

    def __init__(self, inner: MapExpr):
        self.inner = inner
        self.orientation = inner.orientation

    def _eval(self, y):
        return self.inner._inv_eval(y)

    def _slope(self, y):
        return 1.0 / self.inner._slope(self.inner._inv_eval(y))

    def _inv_eval(self, x):
        return self.inner._eval(x)

    def _taylor(self, t, side):
        x0 = self.inner._inv_eval(t.value.copy())
        inner_side = side if self.orientation > 0 else _flip(side)
        jet = self.inner._taylor(Taylor.variable(x0, t.order), inner_side).c
        outer = invert_jet(jet)
        outer[0] = x0
        return t.compose_outer(outer)

    def _inverse(self):
        return self.inner

    def to_dict(self):
        return {"tag": self.tag, "inner": self.inner.to_dict()}

    def __repr__(self):
        return f"Inverse({self.inner!r})"


class Compose(MapExpr):
    """``left o right``."""

    tag = "Compose"

    def __init__(self, left: MapExpr, right: MapExpr):
        self.left, self.right = left, right
        self.orientation = left.orientation * right.orientation

    def _eval(self, x):
        return self.left._eval(self.right._eval(x))

    def _slope(self, x):
        inner = self.right._eval(x.copy())
        return self.left._slope(inner) * self.right._slope(x)

    def _taylor(self, t, side):
        inner = self.right._taylor(t, side)
        return self.left._taylor(inner, side if self.right.orientation > 0 else _flip(side))

    def _inverse(self):
        return compose(inverse(self.right), inverse(self.left))

    def to_dict(self):
        return {"tag": self.tag, "left": self.left.to_dict(), "right": self.right.to_dict()}

    def __repr__(self):
        return f"Compose({self.left!r}, {self.right!r})"


class PiecewiseGlue(MapExpr):
    """``pieces[i]`` on ``[breaks[i-1], breaks[i])``; each piece is a bijection of R."""

    tag = "PiecewiseGlue"

    def __init__(self, breaks: Sequence[float], pieces: Sequence[MapExpr]):
        breaks = tuple(float(b) for b in breaks)
        pieces = tuple(pieces)
        if len(pieces) != len(breaks) + 1:
            raise ValueError("need exactly one more piece than breakpoints")
        if any(b1 >= b2 for b1, b2 in zip(breaks, breaks[1:])):
            raise ValueError("breakpoints must increase strictly")
        orient = {p.orientation for p in pieces}
        if len(orient) != 1:
            raise ValueError("all pieces must share one orientation")
        self.breaks, self.pieces = breaks, pieces
        self.orientation = orient.pop()
        self._bk = np.array(breaks)

    def _index(self, x, side="right"):
        return np.searchsorted(self._bk, x, side=side)

    def _dispatch(self, x, method):
        idx = self._index(x)
        out = np.empty_like(x)
        for i, p in enumerate(self.pieces):
            m = idx == i
            if m.any():
                out[m] = getattr(p, method)(x[m])
        return out

    def _eval(self, x):
        return self._dispatch(x, "_eval")

    def _slope(self, x):
        return self._dispatch(x, "_slope")

    def _taylor(self, t, side):
        idx = self._index(t.value, side)
        out = Taylor(np.zeros_like(t.c))
        for i, p in enumerate(self.pieces):
            m = idx == i
            if m.any():
                out.put(m, p._taylor(t.take(m), side))
        return out

    def joint_gaps(self) -> np.ndarray:
        """``|left piece - right piece|`` at every breakpoint."""
        b = self._bk
        return np.array([abs(self.pieces[i](b[i]) - self.pieces[i + 1](b[i])) for i in range(len(b))])

    def _inverse(self):
        ys = [float(self.pieces[i + 1](b)) for i, b in enumerate(self.breaks)]
        inv = [inverse(p) for p in self.pieces]
        if self.orientation < 0:
            ys, inv = ys[::-1], inv[::-1]
        return PiecewiseGlue(ys, inv)

    def to_dict(self):
        return {"tag": self.tag, "breaks": list(self.breaks), "pieces": [p.to_dict() for p in self.pieces]}

    def __repr__(self):
        return f"PiecewiseGlue({list(self.breaks)!r}, {list(self.pieces)!r})"


class PeriodicLift(MapExpr):
    """``f(x) = base(x - n*period) + n*shift`` with ``n = floor((x - start)/period)``.

    With ``shift == period`` this is the lift rule ``f(x + p) = f(x) + p``;
    a negative ``shift`` gives order reversing lifts like
    ``f(x + 4) = f(x) - 4``.
    """

    tag = "PeriodicLift"

    def __init__(self, base: MapExpr, start: float, period: float, shift: float | None = None):
        shift = period if shift is None else shift
        if period <= 0:
            raise ValueError("period must be positive")
        if (shift > 0) != (base.orientation > 0):
            raise ValueError("shift sign must match the orientation of the base")
        self.base = base
        self.start, self.period, self.shift = float(start), float(period), float(shift)
        self.orientation = base.orientation

    def _cells(self, x, side="right"):
        r = (x - self.start) / self.period
        return np.floor(r) if side == "right" else np.ceil(r) - 1.0

    def _eval(self, x):
        n = self._cells(x)
        return self.base._eval(x - n * self.period) + n * self.shift

    def _slope(self, x):
        n = self._cells(x)
        return self.base._slope(x - n * self.period)

    def _taylor(self, t, side):
        n = self._cells(t.value, side)
        t = t.copy()
        t.c[0] = t.c[0] - n * self.period
        out = self.base._taylor(t, side)
        out.c[0] = out.c[0] + n * self.shift
        return out

    def _inverse(self):
        ib = inverse(self.base)
        if self.shift > 0:
            return PeriodicLift(ib, float(self.base(self.start)), self.shift, self.period)
        y0 = float(self.base(self.start)) + self.shift
        return PeriodicLift(ib, y0, -self.shift, -self.period)

    def to_dict(self):
        return {"tag": self.tag, "base": self.base.to_dict(), "start": self.start,
                "period": self.period, "shift": self.shift}

    def __repr__(self):
        return f"PeriodicLift({self.base!r}, start={self.start!r}, period={self.period!r}, shift={self.shift!r})"


class OrbitExtension(MapExpr):
    """Conjugator built on a fundamental domain of an increasing fixed point free map.

    ``step`` satisfies ``step(x) > x``; ``chart`` maps ``[base, step(base)]`` onto
    ``[0, 1]``.  The map is ``k(x) = chart(step^-n(x)) + n`` where ``n`` brings
    the orbit point into the fundamental domain, so that ``k o step = k + 1``.
    ``inverted`` selects ``k^-1``.
    """

    tag = "OrbitExtension"

    MAX_STEPS = 10**6

    def __init__(self, step: MapExpr, chart: MapExpr, base: float = 0.0, inverted: bool = False):
        if step.orientation < 0 or chart.orientation < 0:
            raise ValueError("orbit extension needs order preserving maps")
        self.step, self.chart = step, chart
        self.base = float(base)
        self.inverted = bool(inverted)
        self._top = float(step(self.base))
        if not self._top > self.base:
            raise ValueError("step map must move the base point upwards")
        self._step_inv = inverse(step)

    def _reduce(self, x, side="right"):
        """Return (y, n) with y = step^-n(x) in the fundamental domain."""
        y = x.copy()
        n = np.zeros_like(x)
        lo_b, hi_b = self.base, self._top
        total = 0
        while True:
            if side == "right":
                hi = y >= hi_b
                lo = y < lo_b
            else:
                hi = y > hi_b
                lo = y <= lo_b
            if not (hi.any() or lo.any()):
                return y, n
            # exact images lie on the far side of the boundary; clamp so that
            # rounding cannot bounce a point across it forever
            if side == "right":
                floor_b, ceil_t = lo_b, np.nextafter(hi_b, -np.inf)
            else:
                floor_b, ceil_t = np.nextafter(lo_b, np.inf), hi_b
            if hi.any():
                y[hi] = np.maximum(self._step_inv._eval(y[hi]), floor_b)
                n[hi] += 1
            if lo.any():
                y[lo] = np.minimum(self.step._eval(y[lo]), ceil_t)
                n[lo] -= 1
            total += 1
            if total > self.MAX_STEPS:
                raise OrbitError("orbit iteration exceeded its bound")

    def _iterate(self, y, n, taylor=False, side="right"):
        """Apply ``step^n`` pointwise (n may be negative)."""
        n = n.copy()
        total = 0
        while True:
            up = n > 0
            down = n < 0
            if not (up.any() or down.any()):
                return y
            for mask, f in ((up, self.step), (down, self._step_inv)):
                if mask.any():
                    if taylor:
                        y.put(mask, f._taylor(y.take(mask), side))
                    else:
                        y[mask] = f._eval(y[mask])
            n[up] -= 1
            n[down] += 1
            total += 1
            if total > self.MAX_STEPS:
                raise OrbitError("orbit iteration exceeded its bound")

    def _forward(self, x):
        y, n = self._reduce(x)
        return self.chart._eval(y) + n

    def _backward(self, z):
        n = np.floor(z)
        y = inverse(self.chart)._eval(z - n)
        return self._iterate(y, n)

    def _eval(self, x):
        return self._backward(x) if self.inverted else self._forward(x)

    def _taylor(self, t, side):
        if not self.inverted:
            _, n = self._reduce(t.value.copy(), side)
            y = self._iterate(t.copy(), -n, taylor=True, side=side)
            out = self.chart._taylor(y, side)
            out.c[0] = out.c[0] + n
            return out
        z = t.value
        n = np.floor(z) if side == "right" else np.ceil(z) - 1.0
        t = t.copy()
        t.c[0] = t.c[0] - n
        y = inverse(self.chart)._taylor(t, side)
        return self._iterate(y, n, taylor=True, side=side)

    def _inverse(self):
        return OrbitExtension(self.step, self.chart, self.base, not self.inverted)

    def to_dict(self):
        return {"tag": self.tag, "step": self.step.to_dict(), "chart": self.chart.to_dict(),
                "base": self.base, "inverted": self.inverted}


# ---------------------------------------------------------------------------
# constructors with simplification
# ---------------------------------------------------------------------------

def compose(*maps: MapExpr) -> MapExpr:
    """``maps[0] o maps[1] o ...``, eliding identities and folding affine pairs."""
    out: MapExpr | None = None
    for f in reversed(maps):
        if isinstance(f, Identity):
            continue
        if out is None:
            out = f
        elif isinstance(f, Affine) and isinstance(out, Affine):
            out = _affine(f.slope * out.slope, f.slope * out.offset + f.offset)
        elif isinstance(f, Affine) and isinstance(out, Compose) and isinstance(out.left, Affine):
            out = compose(compose(f, out.left), out.right)
        else:
            out = Compose(f, out)
    return Identity() if out is None else out


def _affine(slope, offset):
    if slope == 1.0 and offset == 0.0:
        return Identity()
    return Affine(slope, offset)


def inverse(f: MapExpr) -> MapExpr:
    cached = getattr(f, "_inv_cache", None)
    if cached is None:
        cached = f._inverse()
        f._inv_cache = cached
    return cached


def conjugate_by(u: MapExpr, f: MapExpr) -> MapExpr:
    """``u o f o u^-1``."""
    return compose(u, f, inverse(u))


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def evaluate(f: MapExpr, x):
    return f(x)


def evaluate_inverse(f: MapExpr, y, tol: float = INVERSION_TOL):
    """Solve ``f(x) = y``; the residual is checked against ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = inverse(f)(y)
    resid = np.max(np.abs(np.asarray(f(x)) - np.asarray(y)))
    scale = 1.0 + np.max(np.abs(y))
    if not resid <= max(tol, 64 * np.finfo(float).eps * scale):
        raise ValueError(f"inverse residual {resid:.3e} exceeds tolerance {tol:.1e}")
    return x


@dataclass(frozen=True)
class Jet:
    """Truncated Taylor series of a map at ``point`` (without constant term)."""

    point: float
    value: float
    series: Series


def jet_at(f: MapExpr, a: float, order: int = SMOOTHNESS_ORDER, side: str = "right") -> Jet:
    tay = f._taylor(Taylor.variable(np.array([float(a)]), order), side)
    return Jet(float(a), float(tay.c[0, 0]), Series(tay.c[1:, 0], exact=False))


def taylor_coefficients(f: MapExpr, x, order: int, side: str = "right") -> np.ndarray:
    """Taylor coefficients ``c[k, i]`` of ``f`` at each ``x[i]``."""
    return f._taylor(Taylor.variable(np.atleast_1d(np.asarray(x, dtype=float)), order), side).c


def derivative(f: MapExpr, x, k: int, order: int = SMOOTHNESS_ORDER, side: str = "right"):
    if not 1 <= k <= order:
        raise ValueError(f"derivative order {k} outside 1..{order}")
    c = taylor_coefficients(f, x, k, side)[k] * math.factorial(k)
    return float(c[0]) if np.ndim(x) == 0 else c


def orientation(f: MapExpr) -> str:
    return "preserving" if f.orientation > 0 else "reversing"


def fixed_points(f: MapExpr, a: float, b: float, grid: int = GRID_POINTS,
                 flat_width: float = 0.1, atol: float | None = None) -> list:
    """Fixed points of ``f`` in [a, b] from a sampled grid.

    Sign changes of ``f(x) - x`` are refined by bisection.  A run of grid
    points where ``f(x) == x`` (to ``atol``) has its edges refined by
    bisection too; it is reported as an interval ``(lo, hi)`` when wider
    than ``flat_width`` and otherwise as its midpoint.  Flat maps such as
    the bump family are numerically equal to the identity in a small zone
    around each fixed point, and the midpoint of that zone locates the
    fixed point to about 1e-3.
    """
    if not (a < b and grid >= 2):
        raise ValueError("need a < b and at least 2 grid points")
    x = np.linspace(a, b, grid)
    step = x[1] - x[0]

    def is_zero(p):
        p = np.asarray(p, dtype=float)
        tol = 4 * np.finfo(float).eps * (1.0 + np.abs(p)) if atol is None else atol
        return np.abs(f(p) - p) <= tol

    d = f(x) - x
    zero = is_zero(x)
    found: list = []
    i = 0
    while i < grid:
        if zero[i]:
            j = i
            while j + 1 < grid and zero[j + 1]:
                j += 1
            lo = _flat_edge(is_zero, x[i], -step, flat_width)
            hi = _flat_edge(is_zero, x[j], step, flat_width)
            if hi - lo > flat_width:
                found.append((float(max(lo, a)), float(min(hi, b))))
            else:
                mid = 0.5 * (lo + hi)
                found.append(float(min(max(mid, a), b)))
            i = j + 1
            continue
        if i + 1 < grid and not zero[i + 1] and d[i] * d[i + 1] < 0:
            found.append(_bisect_fixed(f, x[i], x[i + 1], d[i]))
        i += 1
    return found


def _flat_edge(is_zero, inside, step, limit):
    """Edge of a flat zone, walking from ``inside`` in direction ``step``."""
    outside = inside + step
    walked = abs(step)
    while is_zero(outside):
        inside, outside = outside, outside + step
        walked += abs(step)
        if walked > limit + abs(step):
            return outside
    for _ in range(60):
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if is_zero(mid):
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def is_strictly_monotone(f: MapExpr, a: float, b: float, points: int = 4001) -> bool:
    x = np.linspace(a, b, points)
    sgn = f.orientation
    return bool(np.all(sgn * f._slope(x.copy()) > 0) and np.all(sgn * np.diff(f(x)) > 0))


def make_jet_interp(u: float, v: float, yu: float, yv: float, jet_u: Sequence[float],
                    jet_v: Sequence[float], delta: float | None = None,
                    retries: int = 20) -> JetInterp:
    """Build a :class:`JetInterp` and verify strict monotonicity on a fine grid.

    The full two-point Hermite base is tried first unless ``delta`` is
    given; if it is not monotone, the cubic base with flat-cutoff
    corrections is used and its cutoff radius is halved on failure, up to
    ``retries`` times.
    """
    jet_u = [float(c) for c in (jet_u.coeffs if isinstance(jet_u, Series) else jet_u)]
    jet_v = [float(c) for c in (jet_v.coeffs if isinstance(jet_v, Series) else jet_v)]
    if delta is None:
        f = JetInterp(u, v, yu, yv, jet_u, jet_v, base="hermite")
        if is_strictly_monotone(f, u, v):
            return f
        delta = 0.4 * (v - u)
    for _ in range(retries + 1):
        f = JetInterp(u, v, yu, yv, jet_u, jet_v, delta, base="cubic")
        if is_strictly_monotone(f, u, v):
            return f
        delta *= 0.5
    raise MonotonicityError(f"no monotone interpolant on [{u}, {v}] after {retries} halvings of delta")


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def from_dict(d: dict) -> MapExpr:
    tag = d["tag"]
    if tag == "Identity":
        return Identity()
    if tag == "Affine":
        return Affine(d["slope"], d["offset"])
    if tag == "BumpSeed":
        return BumpSeed(d["amplitude"])
    if tag == "JetInterp":
        return JetInterp(d["u"], d["v"], d["yu"], d["yv"], d["jet_u"], d["jet_v"], d["delta"],
                         d.get("base", "cubic"))
    if tag == "SoftMin":
        return SoftMin(from_dict(d["a"]), from_dict(d["b"]), d["eps"])
    if tag == "Inverse":
        return Inverse(from_dict(d["inner"]))
    if tag == "Compose":
        return Compose(from_dict(d["left"]), from_dict(d["right"]))
    if tag == "PiecewiseGlue":
        return PiecewiseGlue(d["breaks"], [from_dict(p) for p in d["pieces"]])
    if tag == "PeriodicLift":
        return PeriodicLift(from_dict(d["base"]), d["start"], d["period"], d["shift"])
    if tag == "OrbitExtension":
        return OrbitExtension(from_dict(d["step"]), from_dict(d["chart"]), d["base"], d["inverted"])
    raise ValueError(f"unknown map tag {tag!r}")


def to_json(f: MapExpr, **kw) -> str:
    return json.dumps(f.to_dict(), **kw)


def from_json(text: str) -> MapExpr:
    return from_dict(json.loads(text))
