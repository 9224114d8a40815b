"""Periodic sign words for maps whose fixed point set is the integers.

Symbol ``j`` of a word records the sign of ``f(x) - x`` on ``(j, j+1)``; the
word repeats with period ``n`` in both directions.  Translations act on
words by cyclic shifts and order reversing reflections ``x -> 2c - x`` by
index reflections, so reversibility questions for such maps reduce to
finite enumerations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .smoothmap import MapExpr

HALF_TURN_WORD = "+++--+---++-"

_SYMBOLS = {"+": 1, "-": -1, "−": -1}


@dataclass(frozen=True)
class SigWord:
    symbols: tuple

    def __init__(self, symbols):
        if isinstance(symbols, str):
            try:
                vals = tuple(_SYMBOLS[ch] for ch in symbols.replace(",", "").replace(" ", ""))
            except KeyError as exc:
                raise ValueError(f"invalid symbol {exc.args[0]!r} in signature word") from None
        else:
            vals = tuple(int(v) for v in symbols)
            if any(v not in (1, -1) for v in vals):
                raise ValueError("signature symbols must be +1 or -1")
        if not vals:
            raise ValueError("signature word must be non-empty")
        object.__setattr__(self, "symbols", vals)

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, j: int) -> int:
        return self.symbols[j % len(self.symbols)]

    def __str__(self):
        return "".join("+" if v > 0 else "-" for v in self.symbols)

    def __repr__(self):
        return f"SigWord({str(self)!r})"


def _word(w) -> SigWord:
    return w if isinstance(w, SigWord) else SigWord(w)


def flip(w) -> SigWord:
    """Signature of the inverse map."""
    w = _word(w)
    return SigWord(tuple(-v for v in w.symbols))


def shift(w, k: int) -> SigWord:
    """Signature of ``h f h^-1`` for ``h(x) = x + k``: ``w'[j] = w[j - k]``."""
    w = _word(w)
    n = len(w)
    return SigWord(tuple(w.symbols[(j - k) % n] for j in range(n)))


def reflect(w, c) -> SigWord:
    """Index reflection of ``w`` induced by ``r(x) = 2c - x``, ``c`` in (1/2)Z.

    ``r`` sends ``(j, j+1)`` to ``(2c-1-j, 2c-j)``.  Since
    ``rfr(r(x)) - r(x) = -(f(x) - x)``, the word of ``r f r`` is
    ``flip(reflect(w, c))``; so ``r`` reverses ``f`` on the signature level
    exactly when ``reflect(w, c) == w``.
    """
    w = _word(w)
    two_c = Fraction(c) * 2
    if two_c.denominator != 1:
        raise ValueError("reflection centre must be an integer or half integer")
    n = len(w)
    m = int(two_c) - 1
    return SigWord(tuple(w.symbols[(m - j) % n] for j in range(n)))


def is_translation_reversible(w, k: int) -> bool:
    return shift(w, k) == flip(w)


def centres(n: int) -> list[Fraction]:
    return [Fraction(i, 2) for i in range(2 * n)]


def reflection_compatible_centers(w) -> list[Fraction]:
    """Centres ``c`` in {0, 1/2, ..., n - 1/2} with ``reflect(w, c) == w``."""
    w = _word(w)
    return [c for c in centres(len(w)) if reflect(w, c) == w]


def translation_shifts(w) -> list[int]:
    w = _word(w)
    return [k for k in range(len(w)) if is_translation_reversible(w, k)]


def _num(c: Fraction):
    return int(c) if c.denominator == 1 else float(c)


def classify(w) -> dict:
    """All reversing shifts (of n) and reflection-symmetric centres (of 2n)."""
    w = _word(w)
    return {
        "word": str(w),
        "length": len(w),
        "shifts": translation_shifts(w),
        "centers": [_num(c) for c in reflection_compatible_centers(w)],
    }


def signature_of(f: MapExpr, lo: int = 0, hi: int | None = None, tol: float = 1e-10) -> SigWord:
    """Read the word of ``f`` from the intervals ``(j, j+1)``, ``lo <= j < hi``.

    Integers in ``[lo, hi]`` must be fixed points of ``f`` and no midpoint
    ``j + 1/2`` may be.
    """
    if hi is None:
        raise ValueError("signature_of needs an explicit range")
    lo, hi = int(lo), int(hi)
    if hi <= lo:
        raise ValueError("empty range")
    ints = np.arange(lo, hi + 1, dtype=float)
    off = np.abs(f(ints) - ints)
    if np.any(off > tol):
        j = ints[int(np.argmax(off))]
        raise ValueError(f"integer {j:g} is not a fixed point; map is not of signature type")
    mids = ints[:-1] + 0.5
    d = f(mids) - mids
    if np.any(d == 0):
        j = mids[int(np.argmax(d == 0))]
        raise ValueError(f"midpoint {j:g} is a fixed point; map is not of signature type")
    return SigWord(tuple(1 if v > 0 else -1 for v in d))
