"""Builders for the explicit reversible maps, each returned with witnesses.

Every builder checks its own witnesses on a grid before returning, so a
:class:`WitnessedMap` in hand has already passed its relations.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import series as ser
from .series import Series
from .signature import SigWord, flip, shift
from .smoothmap import (
    JET_TOL,
    SMOOTHNESS_ORDER,
    Affine,
    BumpSeed,
    Identity,
    MapExpr,
    MonotonicityError,
    Negate,
    OrbitExtension,
    PeriodicLift,
    PiecewiseGlue,
    Translate,
    compose,
    inverse,
    jet_at,
    make_jet_interp,
)
from .verify import (
    CheckReport,
    check_commutation,
    check_conjugation,
    check_dominates,
    check_involution,
    check_reverses,
    min_displacement,
)

BUILD_GRID = (-10.0, 10.0, 2001)
BUILD_TOL = 1e-9
DEFAULT_AMPLITUDE = 0.3

RELATIONS = ("reverses", "conjugates-to", "involution", "commutes")


class ConstructionError(RuntimeError):
    """A builder could not produce a map passing its own checks."""


@dataclass(frozen=True)
class Witness:
    relation: str
    witness: MapExpr
    target: MapExpr | None = None
    # translation amount for "commutes", image map for "conjugates-to"
    param: object = None


@dataclass
class WitnessedMap:
    map: MapExpr
    witnesses: list[Witness] = field(default_factory=list)
    reports: list[CheckReport] = field(default_factory=list)

    def check(self, grid=BUILD_GRID, tol: float = BUILD_TOL) -> list[CheckReport]:
        return [check_witness(w, self.map, grid, tol) for w in self.witnesses]


def check_witness(w: Witness, default_target: MapExpr, grid, tol) -> CheckReport:
    target = default_target if w.target is None else w.target
    if w.relation == "reverses":
        return check_reverses(w.witness, target, grid, tol)
    if w.relation == "involution":
        return check_involution(w.witness, grid, tol)
    if w.relation == "commutes":
        return check_commutation(target, float(w.param), grid, tol)
    if w.relation == "conjugates-to":
        return check_conjugation(w.witness, target, w.param, grid, tol)
    raise ValueError(f"unknown relation {w.relation!r}")


def _finish(wm: WitnessedMap, grid=BUILD_GRID, tol: float = BUILD_TOL) -> WitnessedMap:
    wm.reports = wm.check(grid, tol)
    bad = [r for r in wm.reports if not r.passed]
    if bad:
        raise ConstructionError("; ".join(str(r) for r in bad))
    return wm


def _pad(coeffs, order=SMOOTHNESS_ORDER):
    c = [float(v) for v in coeffs][:order]
    return c + [0.0] * (order - len(c))


def _flat(order=SMOOTHNESS_ORDER):
    return _pad([1.0], order)


def _check_seed(seed: MapExpr, tol: float = 1e-12):
    if seed.orientation < 0:
        raise ValueError("seed must be order preserving")
    if abs(seed(0.0)) > tol or abs(seed(1.0) - 1.0) > tol:
        raise ValueError("seed must fix 0 and 1")


def _jets_close(a: Series, b: Series, tol: float = JET_TOL) -> bool:
    return all(abs(x - y) <= tol * max(1.0, abs(x)) for x, y in zip(a.coeffs, b.coeffs))


# ---------------------------------------------------------------------------

def build_reversible(seed: MapExpr, order: int = SMOOTHNESS_ORDER, grid=BUILD_GRID,
                     tol: float = BUILD_TOL) -> WitnessedMap:
    """Map with ``f(x + 1) = f^-1(x) + 1`` from a diffeomorphism of [0, 1].

    ``f = seed`` on [0, 1), ``f = 1 + seed^-1(x - 1)`` on [1, 2), lifted with
    period 2.  The seed's jet at 1 must be the inverse of its jet at 0.
    """
    _check_seed(seed)
    if isinstance(seed, Identity):
        f: MapExpr = Identity()
    else:
        j0 = jet_at(seed, 0.0, order, "right").series
        j1 = jet_at(seed, 1.0, order, "left").series
        if not _jets_close(ser.invert(j0), j1):
            raise ValueError("seed jet at 1 is not the inverse of its jet at 0")
        second = compose(Translate(1.0), inverse(seed), Translate(-1.0))
        f = PeriodicLift(PiecewiseGlue([1.0], [seed, second]), 0.0, 2.0)
    wm = WitnessedMap(f, [
        Witness("reverses", Translate(1.0)),
        Witness("commutes", Translate(2.0), param=2.0),
    ])
    return _finish(wm, grid, tol)


def build_strongly_reversible(jet: Series, offset: float = 1.0, order: int = SMOOTHNESS_ORDER,
                              grid=BUILD_GRID, tol: float = BUILD_TOL) -> WitnessedMap:
    """Map reversed by ``-x`` with jet ``jet`` at 0 and tail ``x + offset``.

    ``phi`` interpolates from jet ``P`` at 0 to the translation on
    ``[L, inf)``; ``f = phi`` on ``[0, inf)`` and ``f(x) = -phi^-1(-x)``
    below 0.  The two sides glue smoothly exactly when ``(-X) P (-X) = P^-1``.
    """
    p = jet.truncate(order)
    if not ser.multiplier(p) > 0:
        raise ValueError("jet must have a positive leading coefficient")
    neg = ser.negation(order, exact=p.exact)
    if not ser.is_reversed_by(neg, p, tol=JET_TOL):
        raise ValueError("jet is not strongly reversed by -X at the working order")
    length = 2.0 + abs(offset)
    phi = make_jet_interp(0.0, length, 0.0, length + offset, _pad(p.coeffs, order), _flat(order))
    left = compose(Negate(), inverse(phi), Negate())
    f = PiecewiseGlue([0.0], [left, phi])
    wm = WitnessedMap(f, [Witness("reverses", Negate()), Witness("involution", Negate())])
    return _finish(wm, grid, tol)


def _shifted_bump(j: int, s: float, inverted: bool = False) -> MapExpr:
    b: MapExpr = BumpSeed(s)
    if inverted:
        b = inverse(b)
    return compose(Translate(float(j)), b, Translate(-float(j)))


def build_signature_map(word, amplitude: float = DEFAULT_AMPLITUDE, k: int | None = None,
                        grid=BUILD_GRID, tol: float = BUILD_TOL) -> WitnessedMap:
    """Map fixing every integer with ``sign(f(x) - x) = word[j]`` on ``(j, j+1)``.

    With ``k`` given, bumps are placed on [0, k) and ``f(x + k) = f^-1(x) + k``
    defines the map on [k, 2k); the period is 2k and ``x + k`` reverses f.
    """
    w = word if isinstance(word, SigWord) else SigWord(word)
    s = abs(float(amplitude))
    if not 0 < s < 1:
        raise ValueError("amplitude must satisfy 0 < |s| < 1")
    if k is None:
        pieces = [_shifted_bump(j, s * w[j]) for j in range(len(w))]
        f = PeriodicLift(PiecewiseGlue([float(j) for j in range(1, len(w))], pieces), 0.0, float(len(w)))
        return WitnessedMap(f, [])
    k = int(k)
    if k <= 0:
        raise ValueError("reversal shift must be positive")
    if shift(w, k) != flip(w):
        raise ValueError(f"shift({w}, {k}) = {shift(w, k)} differs from flip = {flip(w)}")
    pieces = [_shifted_bump(j, s * w[j]) for j in range(k)]
    pieces += [_shifted_bump(k + j, s * w[j], inverted=True) for j in range(k)]
    f = PeriodicLift(PiecewiseGlue([float(j) for j in range(1, 2 * k)], pieces), 0.0, 2.0 * k)
    wm = WitnessedMap(f, [Witness("reverses", Translate(float(k)))])
    return _finish(wm, grid, tol)


def build_example_iv(seed: MapExpr, order: int = SMOOTHNESS_ORDER, grid=(-8.0, 8.0, 2001),
                     tol: float = BUILD_TOL) -> WitnessedMap:
    """Order preserving ``f = -tau`` reversed both by ``x + 2`` and by the involution ``tau``.

    ``tau`` is ``-seed`` on [0, 1], its own inverse on [-1, 0), satisfies
    ``tau(x + 2) = -tau(-x) - 2`` on (-1, 1] and ``tau(x + 4) = tau(x) - 4``.
    The witness list carries ``tau`` first.
    """
    _check_seed(seed)
    if isinstance(seed, Identity):
        tau: MapExpr = Negate()
        f: MapExpr = Identity()
    else:
        flat = Series(_flat(order), exact=False)
        if not (_jets_close(jet_at(seed, 0.0, order).series, flat)
                and _jets_close(jet_at(seed, 1.0, order, "left").series, flat)):
            raise ValueError("example (iv) needs a seed with flat jets at 0 and 1")
        inv = inverse(seed)
        pieces = [
            compose(inv, Negate()),                                  # [-1, 0)
            compose(Negate(), seed),                                 # [0, 1)
            compose(Translate(-2.0), seed, Affine(-1.0, 2.0)),       # [1, 2)
            compose(Affine(-1.0, -2.0), inv, Translate(-2.0)),       # [2, 3)
        ]
        tau = PeriodicLift(PiecewiseGlue([0.0, 1.0, 2.0], pieces), -1.0, 4.0, -4.0)
        f = compose(Negate(), tau)
    wm = WitnessedMap(f, [
        Witness("involution", tau),
        Witness("reverses", tau),
        Witness("reverses", Translate(2.0)),
    ])
    return _finish(wm, grid, tol)


# ---------------------------------------------------------------------------

def _bracket_root(fun, lo=-1.0, hi=1.0):
    """Root of a decreasing scalar function."""
    width = 1.0
    for _ in range(200):
        if fun(lo) > 0 > fun(hi):
            break
        if fun(lo) <= 0:
            lo -= width
        if fun(hi) >= 0:
            hi += width
        width *= 2.0
    else:
        raise ConstructionError("could not bracket the fixed point")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if fun(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def involutive_majorant(F: MapExpr, gap: float = 1.0, grid=BUILD_GRID, retries: int = 10,
                        order: int = SMOOTHNESS_ORDER) -> MapExpr:
    """Order reversing involution ``tau`` with ``tau(x) > F(x) + gap/2`` on the grid.

    With ``q`` the fixed point of ``F`` and centre ``c > q``, ``v`` runs from
    ``(c, c)`` with jet ``-X`` down to the level ``E(c) + gap`` where
    ``E = max(F, F^-1)`` and then continues affinely, less steeply than every
    chord of ``E``.  ``tau = v`` above ``c`` and ``v^-1`` below it.  On
    failure the centre offset and the internal margin are doubled.
    """
    if F.orientation > 0:
        raise ValueError("involutive_majorant needs an order reversing map")
    if gap <= 0:
        raise ValueError("gap must be positive")
    Finv = inverse(F)
    q = _bracket_root(lambda x: F(x) - x)
    span = grid[1] - grid[0]
    offset, margin = 1.0, float(gap)
    jet_neg = _pad([-1.0], order)
    for _ in range(retries):
        c = q + offset
        env_c = max(F(c), Finv(c))
        y_end = env_c + margin
        if y_end >= c:
            offset *= 2.0
            continue
        length = c - y_end
        xs = c + length + np.linspace(0.0, 4.0 * span, 4001)[1:]
        env = np.maximum(F(xs), Finv(xs))
        e0 = max(F(c + length), Finv(c + length))
        chord = np.max((env - e0) / (xs - c - length))
        slope = 0.5 * min(chord, -1e-3)
        try:
            v = make_jet_interp(c, c + length, c, y_end, jet_neg, _pad([slope], order))
        except MonotonicityError:
            offset, margin = 2.0 * offset, 2.0 * margin
            continue
        tau = PiecewiseGlue([c], [inverse(v), v])
        if check_dominates(tau, F, grid, 0.5 * gap).passed:
            return tau
        offset, margin = 2.0 * offset, 2.0 * margin
    raise ConstructionError(f"no involutive majorant after {retries} attempts")


def sternberg_conjugator(m: MapExpr, order: int = SMOOTHNESS_ORDER) -> MapExpr:
    """Order preserving ``k`` with ``k(m(x)) = k(x) + 1`` for ``m(x) > x``.

    A chart of the fundamental domain ``[b, m(b)]`` onto ``[0, 1]`` is
    interpolated with jet ``lam*X`` at ``b`` and the jet ``lam*(T_b m)^-1``
    that ``k o m = k + 1`` forces at ``m(b)``; the chart is then spread along
    orbits.  The base ``b`` maximises ``m(x) - x`` over ``[-1, 1]`` (0 on
    ties) since the widest domain gives the tamest chart.  For ``m(x) < x``
    the result satisfies ``k(m(x)) = k(x) - 1``.
    """
    if m.orientation < 0:
        raise ValueError("sternberg_conjugator needs an order preserving map")
    xs = np.linspace(-1.0, 1.0, 401)
    disp = m(xs) - xs
    if np.all(disp < 0):
        mirrored = sternberg_conjugator(compose(Negate(), m, Negate()), order)
        return compose(Negate(), mirrored, Negate())
    if not np.all(disp > 0):
        raise ValueError("m has a fixed point in [-1, 1]")
    if isinstance(m, Affine) and m.slope == 1.0 and m.offset == 1.0:
        return Identity()
    i = int(np.argmax(disp))
    base = 0.0 if disp[i] <= disp[200] * (1 + 1e-9) else float(xs[i])
    mb = float(m(base))
    j0 = jet_at(m, base, order).series
    lam = math.sqrt(j0[1]) / (mb - base)
    end = ser.invert(j0) * lam
    chart = make_jet_interp(base, mb, 0.0, 1.0, _pad([lam], order), end.coeffs)
    return OrbitExtension(m, chart, base)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReferencePair:
    """``f`` and ``g`` reversible with ``u = g^-1 f`` fixed point free and increasing-displacement."""

    f: MapExpr
    g: MapExpr
    k: MapExpr
    u: MapExpr
    a: float
    reports: tuple = ()

    def __iter__(self) -> Iterator[MapExpr]:
        return iter((self.f, self.g, self.k, self.u))


def _affine_conjugate_bump(lo: float, hi: float, s: float) -> MapExpr:
    width = hi - lo
    return compose(Affine(width, lo), BumpSeed(s), Affine(1.0 / width, -lo / width))


@functools.lru_cache(maxsize=4)
def reference_reversible_pair(amplitude: float = DEFAULT_AMPLITUDE, order: int = SMOOTHNESS_ORDER) -> ReferencePair:
    """Reversible ``f``, ``g`` with ``f > g`` everywhere, whose composite u is fixed point free.

    ``f`` is :func:`build_reversible` of a positive bump and ``a`` is the
    midpoint of ``(1/2, f(1/2))``.  On ``[a, 5/2]`` ``g`` is a rescaled
    negative bump below ``f``; ``k`` maps ``[1/2, a]`` onto ``[a, 5/2]`` with
    flat jets.  Then ``g = k^-1 g^-1 k`` on ``[1/2, a]``, ``k = k^-1 + 2`` on
    ``[a, 5/2]`` and both commute with ``x + 2``.
    """
    f = build_reversible(BumpSeed(amplitude), order).map
    half = 0.5
    a = 0.5 * (half + float(f(half)))
    top = 2.5
    flat = _flat(order)
    k0 = make_jet_interp(half, a, a, top, flat, flat)
    k = PeriodicLift(PiecewiseGlue([a], [k0, compose(Translate(2.0), inverse(k0))]), half, 2.0)
    reports = []
    for s in (-0.6, -0.75, -0.9, -0.95):
        g0 = _affine_conjugate_bump(a, top, s)
        g = PeriodicLift(PiecewiseGlue([a], [compose(inverse(k0), inverse(g0), k0), g0]), half, 2.0)
        dom = check_dominates(f, g, BUILD_GRID)
        if dom.passed:
            reports.append(dom)
            break
    else:
        raise ConstructionError("could not place g below f")
    u = compose(inverse(g), f)
    rev_g = check_reverses(k, g, (-6.0, 6.0, 2001), 1e-8)
    rev_f = check_reverses(Translate(1.0), f, BUILD_GRID, BUILD_TOL)
    lo, _ = min_displacement(u, BUILD_GRID)
    if not (rev_g.passed and rev_f.passed and lo > 0):
        raise ConstructionError(f"reference pair failed its checks: {rev_g}; {rev_f}; min(u - x) = {lo:.3e}")
    return ReferencePair(f, g, k, u, a, tuple(reports + [rev_g, rev_f]))


def sternberg_report(m: MapExpr, k: MapExpr, grid=(-5.0, 5.0, 2001), tol: float = 1e-8) -> CheckReport:
    target = Translate(1.0 if float(m(0.0)) > 0 else -1.0)
    return check_conjugation(k, m, target, grid, tol)
