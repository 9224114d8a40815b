"""Grid checks for the functional equations, with auditable reports.

Every check samples an error function on a uniform grid and reports the
sup-norm, the leftmost worst point and the verdict.  Reversal is tested as
``h(f(x)) == f^-1(h(x))``, which needs one numeric inversion instead of two.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .smoothmap import MapExpr, fixed_points, inverse

DEFAULT_GRID = (-5.0, 5.0, 2001)
DEFAULT_TOL = 1e-9

Grid = Sequence


@dataclass(frozen=True)
class CheckReport:
    name: str
    a: float
    b: float
    points: int
    tol: float
    sup_error: float
    worst_x: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __bool__(self):
        return self.passed

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.name}: sup error {self.sup_error:.3e} at x={self.worst_x:.6g} "
                f"(tol {self.tol:.1e}, grid [{self.a:g}, {self.b:g}] x {self.points})")


def _grid(grid: Grid) -> tuple[float, float, int, np.ndarray]:
    a, b, n = float(grid[0]), float(grid[1]), int(grid[2])
    if not (a < b and n >= 2):
        raise ValueError(f"invalid grid {grid!r}")
    return a, b, n, np.linspace(a, b, n)


def report(name: str, grid: Grid, tol: float, x: np.ndarray, lhs: np.ndarray,
           rhs: np.ndarray | None = None) -> CheckReport:
    """Sup of ``|lhs - rhs|`` (NaN counts as infinite), leftmost worst point."""
    a, b, n, _ = _grid(grid)
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.zeros_like(lhs) if rhs is None else np.asarray(rhs, dtype=float)
    sup, idx = _kernels.sup_abs_error(lhs, rhs)
    return CheckReport(name, a, b, n, float(tol), float(sup), float(x[idx]), bool(sup <= tol))


def check_reverses(h: MapExpr, f: MapExpr, grid: Grid = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> CheckReport:
    """``sup |h(f(x)) - f^-1(h(x))|``."""
    *_, x = _grid(grid)
    return report("reverses", grid, tol, x, h(f(x)), inverse(f)(h(x)))


def check_involution(tau: MapExpr, grid: Grid = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> CheckReport:
    *_, x = _grid(grid)
    return report("involution", grid, tol, x, tau(tau(x)), x)


def check_conjugation(k: MapExpr, f: MapExpr, g: MapExpr, grid: Grid = DEFAULT_GRID,
                      tol: float = DEFAULT_TOL) -> CheckReport:
    """``sup |k(f(x)) - g(k(x))|``."""
    *_, x = _grid(grid)
    return report("conjugation", grid, tol, x, k(f(x)), g(k(x)))


def check_wave(f: MapExpr, grid: Grid = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> CheckReport:
    """``sup |f(x + 1) - (f^-1(x) + 1)|``."""
    *_, x = _grid(grid)
    return report("wave", grid, tol, x, f(x + 1.0), inverse(f)(x) + 1.0)


def check_commutation(f: MapExpr, p: float, grid: Grid = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> CheckReport:
    """``sup |f(x + p) - (f(x) + p)|``."""
    *_, x = _grid(grid)
    return report("commutation", grid, tol, x, f(x + p), f(x) + p)


def check_equal(f: MapExpr, g: MapExpr, grid: Grid = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                name: str = "equal") -> CheckReport:
    *_, x = _grid(grid)
    return report(name, grid, tol, x, f(x), g(x))


def check_product(factors: Sequence[MapExpr], target: MapExpr, grid: Grid = DEFAULT_GRID,
                  tol: float = 1e-5) -> CheckReport:
    """Composite of ``factors`` (leftmost applied last) against ``target``."""
    *_, x = _grid(grid)
    y = x.copy()
    for f in reversed(factors):
        y = f(y)
    return report("product", grid, tol, x, y, target(x))


def check_dominates(upper: MapExpr, lower: MapExpr, grid: Grid = DEFAULT_GRID, margin: float = 0.0,
                    name: str = "dominates") -> CheckReport:
    """Passes when ``upper(x) - lower(x) > margin`` on the grid.

    ``sup_error`` is the largest shortfall ``max(0, margin - gap)``, so a pass
    means every gap exceeds the margin.
    """
    *_, x = _grid(grid)
    gap = upper(x) - lower(x)
    short = np.where(gap > margin, 0.0, margin - gap + np.finfo(float).tiny)
    short = np.where(np.isnan(gap), np.inf, short)
    return report(name, grid, 0.0, x, short)


def min_displacement(f: MapExpr, grid: Grid = DEFAULT_GRID) -> tuple[float, float]:
    """``(min, max)`` of ``f(x) - x`` on the grid."""
    *_, x = _grid(grid)
    d = f(x) - x
    return float(d.min()), float(d.max())


def is_fixed_point_free(f: MapExpr, grid: Grid = DEFAULT_GRID) -> bool:
    lo, hi = min_displacement(f, grid)
    return lo > 0 or hi < 0


def reverser_fixed_point_audit(h: MapExpr, f: MapExpr, grid: Grid = DEFAULT_GRID,
                               tol: float = DEFAULT_TOL) -> CheckReport:
    """Fixed points of an order preserving reverser ``h`` against ``f``.

    Every fixed point of ``h`` must be fixed by ``f``; if ``h`` has any fixed
    point at all, ``f`` must be the identity on the grid.
    """
    a, b, n, x = _grid(grid)
    found = fixed_points(h, a, b, n)
    pts: list[float] = []
    for p in found:
        pts.extend(p if isinstance(p, tuple) else (p,))
    if not pts:
        return CheckReport("reverser_fixed_point_audit", a, b, n, float(tol), 0.0, float(a), True)
    probe = np.concatenate([np.array(pts), x])
    return report("reverser_fixed_point_audit", grid, tol, probe, f(probe), probe)


def classify_order_reversing(f: MapExpr, grid: Grid = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> dict:
    """An order reversing map is reversible exactly when it is an involution."""
    if f.orientation > 0:
        raise ValueError("classify_order_reversing needs an order reversing map")
    rep = check_involution(f, grid, tol)
    return {"reversible": rep.passed, "involution": rep.to_dict()}

