"""Factorizations into involutions, strongly reversible and reversible maps.

A :class:`Decomposition` lists factors left to right, so the product
``factors[0] o factors[1] o ...`` is the target, together with the role of
each factor and the map that certifies it.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

from .constructions import (
    involutive_majorant,
    reference_reversible_pair,
    sternberg_conjugator,
)
from .smoothmap import (
    Identity,
    MapExpr,
    Negate,
    SoftMin,
    Translate,
    compose,
    inverse,
)
from .verify import (
    DEFAULT_GRID,
    CheckReport,
    check_involution,
    check_product,
    check_reverses,
    min_displacement,
)

INVOLUTION = "involution"
REVERSIBLE = "reversible-with-witness"
STRONGLY_REVERSIBLE = "strongly-reversible-with-witness"

PRODUCT_TOL = 1e-5
INVOLUTION_TOL = 1e-6
REVERSAL_TOL = 1e-5


@dataclass
class Decomposition:
    target: MapExpr
    factors: list[MapExpr]
    roles: list[str]
    witnesses: list[MapExpr | None]
    # named intermediate maps (majorant, conjugators, minorant ...)
    parts: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.factors)

    def product(self) -> MapExpr:
        return compose(*self.factors)

    def role_reports(self, grid=DEFAULT_GRID, involution_tol: float = INVOLUTION_TOL,
                     reversal_tol: float = REVERSAL_TOL) -> list[CheckReport]:
        out = []
        for f, role, w in zip(self.factors, self.roles, self.witnesses):
            if role == INVOLUTION:
                out.append(check_involution(f, grid, involution_tol))
            else:
                out.append(check_reverses(w, f, grid, reversal_tol))
                if role == STRONGLY_REVERSIBLE:
                    out.append(check_involution(w, grid, involution_tol))
        return out

    def verify(self, grid=DEFAULT_GRID, tol: float = PRODUCT_TOL, involution_tol: float = INVOLUTION_TOL,
               reversal_tol: float = REVERSAL_TOL) -> list[CheckReport]:
        return [check_product(self.factors, self.target, grid, tol)] + self.role_reports(
            grid, involution_tol, reversal_tol)

    def passed(self, **kw) -> bool:
        return all(r.passed for r in self.verify(**kw))


def _require(f: MapExpr, sign: int, what: str):
    if f.orientation != sign:
        kind = "order preserving" if sign > 0 else "order reversing"
        raise ValueError(f"{what} needs an {kind} map")


def three_involutions(f: MapExpr, gap: float = 1.0) -> Decomposition:
    """``f = tau o rho o (rho o m)`` for order reversing ``f``.

    ``tau`` is an involution above ``f``, so ``m = tau o f`` moves every point
    up; with ``k`` conjugating ``m`` to ``x + 1``, ``rho = k^-1 o (-x) o k``
    reverses ``m`` and ``rho o m`` is an involution.
    """
    _require(f, -1, "three_involutions")
    tau = involutive_majorant(f, gap)
    m = compose(tau, f)
    k = sternberg_conjugator(m)
    rho = compose(inverse(k), Negate(), k)
    third = compose(rho, m)
    return Decomposition(f, [tau, rho, third], [INVOLUTION] * 3, [None] * 3,
                         {"majorant": tau, "m": m, "conjugator": k})


def four_involutions(f: MapExpr, gap: float = 1.0) -> Decomposition:
    """``f = (-x) o t1 o t2 o t3`` where ``t1 t2 t3`` factors ``-f``."""
    _require(f, 1, "four_involutions")
    inner = three_involutions(compose(Negate(), f), gap)
    return Decomposition(f, [Negate()] + inner.factors, [INVOLUTION] * 4, [None] * 4, inner.parts)


def two_strongly_reversible(f: MapExpr, gap: float = 1.0) -> Decomposition:
    """Two factors, each a product of two involutions and reversed by one of them."""
    if f.orientation > 0:
        inv = four_involutions(f, gap).factors
        pairs = [(inv[0], inv[1]), (inv[2], inv[3])]
        witnesses = [inv[1], inv[3]]
    else:
        inv = three_involutions(f, gap).factors
        pairs = [(inv[0], Identity()), (inv[1], inv[2])]
        witnesses = [inv[0], inv[2]]
    factors = [compose(a, b) for a, b in pairs]
    return Decomposition(f, factors, [STRONGLY_REVERSIBLE] * 2, witnesses,
                         {"involution_pairs": pairs})


def two_reversibles_fixed_point_free(m: MapExpr) -> Decomposition:
    """``m = (c^-1 g^-1 c) o (c^-1 f c)`` for fixed point free order preserving ``m``.

    ``c = k_u^-1 o k_m`` conjugates ``m`` to the reference map ``u = g^-1 f``.
    Maps moving points down are handled on the mirror image ``-m(-x)``.
    """
    _require(m, 1, "two_reversibles_fixed_point_free")
    lo, hi = min_displacement(m)
    if not (lo > 0 or hi < 0):
        raise ValueError("map has a fixed point on the working grid")
    if hi < 0:
        mirrored = two_reversibles_fixed_point_free(compose(Negate(), m, Negate()))
        neg = lambda h: compose(Negate(), h, Negate())
        return Decomposition(m, [neg(h) for h in mirrored.factors], mirrored.roles,
                             [neg(w) for w in mirrored.witnesses], dict(mirrored.parts, mirrored=True))
    pair = reference_reversible_pair()
    k_u = _reference_conjugator()
    k_m = sternberg_conjugator(m)
    c = compose(inverse(k_u), k_m)
    ci = inverse(c)

    def conj(h):
        return compose(ci, h, c)

    factors = [conj(inverse(pair.g)), conj(pair.f)]
    witnesses = [conj(pair.k), conj(Translate(1.0))]
    return Decomposition(m, factors, [REVERSIBLE] * 2, witnesses, {"conjugator": c, "mirrored": False})


@functools.lru_cache(maxsize=1)
def _reference_conjugator() -> MapExpr:
    return sternberg_conjugator(reference_reversible_pair().u)


def fixed_point_free_minorant(f: MapExpr, eps: float = 0.5) -> MapExpr:
    """Increasing ``g`` with ``g < f - 1`` and ``g < x - 1`` everywhere.

    ``g`` is the smooth minimum of ``f`` and the identity shifted down by 1.
    The smooth minimum is increasing and below both arguments, so ``g`` is
    fixed point free and below ``f`` without any grid search.
    """
    _require(f, 1, "fixed_point_free_minorant")
    return compose(Translate(-1.0), SoftMin(f, Identity(), eps))


def four_reversibles(f: MapExpr) -> Decomposition:
    """``f = g o h`` with ``g`` a fixed point free minorant and ``h = g^-1 f``.

    Both ``g`` (moving points down) and ``h`` (moving points up) split into
    two reversible factors.
    """
    _require(f, 1, "four_reversibles")
    g = fixed_point_free_minorant(f)
    h = compose(inverse(g), f)
    dg = two_reversibles_fixed_point_free(g)
    dh = two_reversibles_fixed_point_free(h)
    return Decomposition(f, dg.factors + dh.factors, dg.roles + dh.roles, dg.witnesses + dh.witnesses,
                         {"minorant": g, "h": h})


METHODS = {
    "three-involutions": three_involutions,
    "four-involutions": four_involutions,
    "two-sr": two_strongly_reversible,
    "two-reversible-fpf": two_reversibles_fixed_point_free,
    "four-reversible": four_reversibles,
}
