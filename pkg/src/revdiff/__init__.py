"""Reversible diffeomorphisms of the real line, made computational.

Exact power series algebra (:mod:`revdiff.series`), smooth maps as
expression trees (:mod:`revdiff.smoothmap`), explicit reversible
constructions (:mod:`revdiff.constructions`), signature words
(:mod:`revdiff.signature`), factorizations (:mod:`revdiff.decompose`) and
grid checks (:mod:`revdiff.verify`).
"""

from .series import Obstruction, Series
from .smoothmap import (
    Affine,
    BumpSeed,
    Compose,
    Identity,
    Inverse,
    JetInterp,
    MapExpr,
    Negate,
    PeriodicLift,
    PiecewiseGlue,
    Translate,
    compose,
    inverse,
)
from .verify import CheckReport

__version__ = "0.1.0"

__all__ = [
    "Affine", "BumpSeed", "CheckReport", "Compose", "Identity", "Inverse", "JetInterp", "MapExpr",
    "Negate", "Obstruction", "PeriodicLift", "PiecewiseGlue", "Series", "Translate", "compose", "inverse",
]
