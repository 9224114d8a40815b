"""Truncated formal power series without constant term.

A :class:`Series` of order ``N`` stores ``a_1 .. a_N`` of ``a_1 X + ... + a_N X^N``.
Coefficients are either all exact (:class:`fractions.Fraction`) or all
floats. Elements with ``a_1 != 0`` form a group under composition, with
identity ``X``.

The low-level helpers (``_mul``, ``_compose``, ``_invert``) work on plain
coefficient lists indexed by power and accept any arithmetic type,
including numpy arrays; :mod:`revdiff.taylor` reuses them for vectorised
float jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

DEFAULT_ORDER = 16
FLOAT_TOL = 1e-12


# -- coefficient-list kernels (index == power, list length N + 1) ----------

def _mul(a, b, n):
    """Truncated product of two coefficient lists through ``X^n``."""
    out = [0 * a[0]] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if _is_zero(ai):
            continue
        for j in range(0, n + 1 - i):
            out[i + j] = out[i + j] + ai * b[j]
    return out


def _compose(a, b, n):
    """``a(b(X))`` through ``X^n``; ``b`` must have zero constant term."""
    out = [0 * a[0]] * (n + 1)
    out[0] = a[n] if n < len(a) else 0 * a[0]
    for k in range(min(n, len(a) - 1) - 1, -1, -1):
        out = _mul(out, b, n)
        out[0] = out[0] + a[k]
    return out


def _common(a):
    """Integer numerators over one denominator for a list of Fractions."""
    den = math.lcm(*(x.denominator for x in a))
    return [x.numerator * (den // x.denominator) for x in a], den


def _compose_exact(a, b, n):
    """:func:`_compose` for Fractions, run on integers to skip per-step gcds.

    Horner with ``V_k = V_{k+1} B + A_k d^(n-k)`` keeps every partial sum
    over the single denominator ``D d^(n-k)``.
    """
    A, da = _common(list(a[: n + 1]) + [Fraction(0)] * (n + 1 - len(a)))
    B, db = _common(b[: n + 1])
    v = [A[n]] + [0] * n
    scale = 1
    for k in range(n - 1, -1, -1):
        scale *= db
        v = _mul(v, B, n)
        v[0] += A[k] * scale
    den = da * scale
    return [Fraction(x, den) for x in v]


def _powers(b, n):
    """``[b^0, b^1, ..., b^n]`` truncated at ``X^n``."""
    one = [b[1] * 0 + 1] + [b[1] * 0] * n
    pw = [one, list(b[: n + 1])]
    for _ in range(2, n + 1):
        pw.append(_mul(pw[-1], b, n))
    return pw


def _invert(a, n):
    """Compositional inverse ``T`` of ``a`` (``a[0] == 0``) through ``X^n``.

    Solves ``T(a(X)) = X`` as ``sum_k t_k a^k``; the system is triangular
    because ``a^k`` starts at ``X^k`` with coefficient ``a_1^k``.
    """
    pw = _powers(a, n)
    t = [a[1] * 0] * (n + 1)
    for m in range(1, n + 1):
        acc = (a[1] * 0 + 1) if m == 1 else a[1] * 0
        for k in range(1, m):
            acc = acc - t[k] * pw[k][m]
        t[m] = acc / pw[m][m]
    return t


def _is_zero(x):
    try:
        return x == 0
    except ValueError:  # numpy arrays
        return False


# -- Series value type ------------------------------------------------------

def _coerce(values, exact):
    vals = list(values)
    if exact is None:
        exact = all(isinstance(v, (Rational, str)) and not isinstance(v, bool) for v in vals)
    if exact:
        return tuple(Fraction(v) for v in vals)
    return tuple(float(v) for v in vals)


@dataclass(frozen=True)
class Series:
    """Truncated series ``a_1 X + ... + a_N X^N`` (value semantics)."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence, exact: bool | None = None):
        if len(coeffs) < 1:
            raise ValueError("series order must be at least 1")
        object.__setattr__(self, "coeffs", _coerce(coeffs, exact))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def exact(self) -> bool:
        return isinstance(self.coeffs[0], Fraction)

    def _list(self):
        return [self.coeffs[0] * 0] + list(self.coeffs)

    @classmethod
    def _from_list(cls, lst, exact):
        return cls(lst[1:], exact=exact)

    def __getitem__(self, power: int):
        """Coefficient of ``X^power`` (0 for the constant term)."""
        if power == 0:
            return self.coeffs[0] * 0
        return self.coeffs[power - 1]

    def __repr__(self):
        return f"Series({self.to_text()!r})"

    def __str__(self):
        terms = []
        for p, c in enumerate(self.coeffs, start=1):
            if c == 0:
                continue
            mono = "X" if p == 1 else f"X^{p}"
            terms.append(mono if c == 1 else "-" + mono if c == -1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"

    def as_float(self) -> "Series":
        return Series([float(c) for c in self.coeffs], exact=False)

    def truncate(self, n: int) -> "Series":
        if n > self.order:
            return Series(list(self.coeffs) + [self.coeffs[0] * 0] * (n - self.order), exact=self.exact)
        return Series(self.coeffs[:n], exact=self.exact)

    def __neg__(self):
        return Series([-c for c in self.coeffs], exact=self.exact)

    def __mul__(self, k):
        return Series([k * c for c in self.coeffs], exact=self.exact)

    __rmul__ = __mul__

    # textual form: "<order> c1 c2 ... cN"
    def to_text(self) -> str:
        return " ".join([str(self.order)] + [_fmt(c) for c in self.coeffs])

    @classmethod
    def from_text(cls, text: str) -> "Series":
        parts = text.split()
        if not parts:
            raise ValueError("empty series text")
        n = int(parts[0])
        vals = [_parse(p) for p in parts[1:]]
        if len(vals) != n:
            raise ValueError(f"series text declares order {n} but has {len(vals)} coefficients")
        return cls(vals)


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(float(c))


def _parse(tok: str):
    try:
        return Fraction(tok) if not any(ch in tok for ch in ".eE") or "/" in tok else float(tok)
    except ValueError:
        return float(tok)


def _check_pair(s: Series, t: Series):
    if s.order != t.order:
        raise ValueError(f"order mismatch: {s.order} != {t.order}")
    if s.exact != t.exact:
        raise ValueError("cannot mix exact and floating series")


def _equal(a: Series, b: Series, tol: float) -> bool:
    if a.exact:
        return a.coeffs == b.coeffs
    return all(math.isclose(x, y, rel_tol=tol, abs_tol=tol) for x, y in zip(a.coeffs, b.coeffs))


# -- group operations -------------------------------------------------------

def identity(n: int = DEFAULT_ORDER, exact: bool = True) -> Series:
    if n < 1:
        raise ValueError("order must be >= 1")
    return Series([1] + [0] * (n - 1), exact=exact)


def negation(n: int = DEFAULT_ORDER, exact: bool = True) -> Series:
    """The involution ``-X``."""
    return Series([-1] + [0] * (n - 1), exact=exact)


def mobius(sign: int, n: int = DEFAULT_ORDER) -> Series:
    """``X/(1 - X)`` for ``sign=+1`` and ``X/(1 + X)`` for ``sign=-1``."""
    return Series([sign ** (k - 1) for k in range(1, n + 1)], exact=True)


def compose(s: Series, t: Series) -> Series:
    """``s(t(X))`` truncated at the common order."""
    _check_pair(s, t)
    n = s.order
    kernel = _compose_exact if s.exact else _compose
    return Series._from_list(kernel(s._list(), t._list(), n), s.exact)


def invert(s: Series) -> Series:
    if s.coeffs[0] == 0:
        raise ZeroDivisionError("series with zero linear coefficient is not invertible")
    return Series._from_list(_invert(s._list(), s.order), s.exact)


def conjugate(u: Series, s: Series) -> Series:
    """``u o s o u^-1``."""
    return compose(u, compose(s, invert(u)))


def multiplier(s: Series):
    return s.coeffs[0]


def lowest_order(s: Series) -> int | None:
    """Least ``p >= 2`` with ``a_p != 0`` for a series tangent to the identity."""
    if s.coeffs[0] != 1:
        raise ValueError("lowest_order needs multiplier 1")
    for p, c in enumerate(s.coeffs[1:], start=2):
        if c != 0:
            return p
    return None


def is_identity(s: Series, tol: float = FLOAT_TOL) -> bool:
    return _equal(s, identity(s.order, exact=s.exact), tol)


def is_involution(s: Series, tol: float = FLOAT_TOL) -> bool:
    return is_identity(compose(s, s), tol)


def is_reversed_by(t: Series, s: Series, tol: float = FLOAT_TOL) -> bool:
    """True when ``t s t^-1 == s^-1`` through the working order."""
    return _equal(conjugate(t, s), invert(s), tol)


def commutes(s: Series, t: Series, tol: float = FLOAT_TOL) -> bool:
    return _equal(compose(s, t), compose(t, s), tol)


# -- reverser solver --------------------------------------------------------

@dataclass(frozen=True)
class Obstruction:
    """No reverser with the requested lead: the equation at ``order`` is inconsistent."""

    order: int
    residual: object

    def __str__(self):
        return f"obstruction at order {self.order} (residual {_fmt(self.residual)})"


def _derivative(a):
    return [k * a[k] for k in range(1, len(a))] + [a[0] * 0]


def solve_reverser(s: Series, lead, n: int | None = None) -> Series | Obstruction:
    """Find ``T = lead*X + ...`` with ``T o S = S^-1 o T`` through order ``n``.

    Orders are processed in turn.  At order ``m`` the residual of
    ``T o S - S^-1 o T`` is affine in the still undetermined coefficients
    that reach it; the one with the largest index is solved for.  An order
    with non-zero residual and no reachable unknown is an obstruction.
    Coefficients never pinned by an equation are free: with a negative
    lead they are chosen so that ``T o T = X`` wherever that fixes them,
    otherwise they are 0.
    """
    n = s.order if n is None else n
    if n > s.order:
        raise ValueError("requested order exceeds the series order")
    if lead == 0:
        raise ValueError("lead coefficient must be non-zero")
    s = s.truncate(n)
    exact = s.exact
    if exact:
        lead = Fraction(lead)
    zero = s.coeffs[0] * 0
    a = s._list()
    b = invert(s)._list()
    db = _derivative(b)[: n + 1]
    spow = _powers(a, n)

    t = [zero] * (n + 1)
    t[1] = lead
    pending = set(range(2, n + 1))

    def residual(tt):
        lhs = [zero] * (n + 1)
        for k in range(1, n + 1):
            if not _is_zero(tt[k]):
                for m in range(k, n + 1):
                    lhs[m] = lhs[m] + tt[k] * spow[k][m]
        rhs = _compose(b, tt, n)
        return [lhs[m] - rhs[m] for m in range(n + 1)]

    for m in range(1, n + 1):
        r = residual(t)[m]
        # d/dt_j of [T o S - S^-1 o T]_m = [S^j]_m - [(S^-1)'(T)]_{m-j}
        dbt = _compose(db, t, n)
        cands = []
        for j in sorted(pending):
            if j > m:
                break
            c = spow[j][m] - dbt[m - j]
            if not _is_close_zero(c, exact):
                cands.append((j, c))
        if not cands:
            if _is_close_zero(r, exact):
                continue
            return Obstruction(m, r)
        j, c = cands[-1]
        t[j] = -r / c
        pending.discard(j)

    if lead < 0:
        for j in sorted(pending):
            if j % 2 == 1:
                tt = _compose(t, t, n)
                t[j] = t[j] + tt[j] / 2

    final = residual(t)
    for m in range(1, n + 1):
        if not _is_close_zero(final[m], exact):
            return Obstruction(m, final[m])
    return Series._from_list(t, exact)


def _is_close_zero(x, exact):
    if exact:
        return x == 0
    return abs(x) <= FLOAT_TOL
