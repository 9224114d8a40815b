from fractions import Fraction

import numpy as np
import pytest

from revdiff import series as ser
from revdiff.constructions import (
    ConstructionError,
    WitnessedMap,
    build_example_iv,
    build_reversible,
    build_signature_map,
    build_strongly_reversible,
    involutive_majorant,
    reference_reversible_pair,
    sternberg_conjugator,
    sternberg_report,
)
from revdiff.series import Series
from revdiff.signature import HALF_TURN_WORD
from revdiff.smoothmap import (
    Affine,
    BumpSeed,
    Identity,
    Negate,
    Translate,
    compose,
    fixed_points,
    inverse,
    orientation,
)
from revdiff.verify import (
    check_commutation,
    check_dominates,
    check_involution,
    check_reverses,
    is_fixed_point_free,
    min_displacement,
)

GRID10 = (-10.0, 10.0, 2001)


@pytest.fixture(scope="module")
def rev():
    return build_reversible(BumpSeed(0.3))


def test_build_reversible_examples(rev):
    f = build_reversible(Identity()).map
    x = np.linspace(-10, 10, 2001)
    assert np.max(np.abs(f(x) - x)) == 0.0
    assert check_reverses(Translate(1.0), rev.map, GRID10, 1e-9).passed
    assert check_commutation(rev.map, 2.0, GRID10, 1e-12).passed
    assert all(r.passed for r in rev.reports)
    assert {w.relation for w in rev.witnesses} == {"reverses", "commutes"}


def test_build_reversible_fixes_integers(rev):
    n = np.arange(-10, 11, dtype=float)
    assert np.max(np.abs(rev.map(n) - n)) < 1e-10


def test_build_reversible_follows_the_seed(rev):
    b = BumpSeed(0.3)
    y = np.linspace(0.05, 0.95, 19)
    for n in (-4, 0, 3):
        assert np.allclose(rev.map(y + 2 * n), b(y) + 2 * n, atol=1e-13)
        assert np.allclose(rev.map(y + 2 * n + 1), inverse(b)(y) + 2 * n + 1, atol=1e-13)


def test_build_reversible_rejects_bad_seed():
    with pytest.raises(ValueError):
        build_reversible(Affine(2.0, 0.0))
    with pytest.raises(ValueError):
        build_reversible(Negate())


def test_strongly_reversible_examples():
    order = 8
    wm = build_strongly_reversible(ser.identity(order))
    assert check_reverses(Negate(), wm.map, GRID10, 1e-9).passed
    p = ser.mobius(1, order)
    neg = ser.negation(order)
    assert ser.conjugate(neg, p) == ser.invert(p)
    wm = build_strongly_reversible(p)
    assert check_reverses(Negate(), wm.map, GRID10, 1e-9).passed
    assert check_involution(Negate()).passed
    with pytest.raises(ValueError):
        build_strongly_reversible(Series([Fraction(1), Fraction(0), Fraction(1)] + [Fraction(0)] * 5))


def test_strongly_reversible_matches_jet():
    from revdiff.smoothmap import jet_at

    p = ser.mobius(1, 8)
    f = build_strongly_reversible(p).map
    j = jet_at(f, 0.0, 6).series
    assert np.allclose(j.coeffs, [float(c) for c in p.coeffs[:6]], atol=1e-8)
    jl = jet_at(f, 0.0, 6, "left").series
    assert np.allclose(jl.coeffs, j.coeffs, atol=1e-8)


def test_signature_map_examples():
    wm = build_signature_map(HALF_TURN_WORD, 0.3, 6)
    assert check_reverses(Translate(6.0), wm.map, GRID10, 1e-9).passed
    wm = build_signature_map("+-", 0.3, 1)
    assert check_reverses(Translate(1.0), wm.map, GRID10, 1e-9).passed
    with pytest.raises(ValueError):
        build_signature_map("++", 0.3, 1)
    assert build_signature_map("+-").witnesses == []


def test_signature_map_fixes_integers():
    f = build_signature_map(HALF_TURN_WORD, 0.3, 6).map
    n = np.arange(-12, 13, dtype=float)
    assert np.max(np.abs(f(n) - n)) < 1e-12


def test_example_iv():
    wm = build_example_iv(BumpSeed(0.3))
    tau = wm.witnesses[0].witness
    grid = (-8.0, 8.0, 2001)
    assert check_involution(tau, grid, 1e-9).passed
    assert check_reverses(tau, wm.map, grid, 1e-9).passed
    assert check_reverses(Translate(2.0), wm.map, grid, 1e-9).passed
    assert orientation(wm.map) == "preserving" and orientation(tau) == "reversing"
    x = np.linspace(-3, 3, 61)
    assert np.allclose(tau(x + 4), tau(x) - 4, atol=1e-12)
    deg = build_example_iv(Identity())
    assert isinstance(deg.map, Identity) and all(r.passed for r in deg.reports)


def test_example_iv_rejects_non_flat_seed():
    from revdiff.smoothmap import make_jet_interp

    seed = make_jet_interp(0.0, 1.0, 0.0, 1.0, [1.5, 0.0], [1.5, 0.0])
    with pytest.raises(ValueError):
        build_example_iv(seed)


@pytest.mark.parametrize("build", [
    lambda: build_reversible(BumpSeed(0.3)),
    lambda: build_example_iv(BumpSeed(0.3)),
    lambda: build_signature_map(HALF_TURN_WORD, 0.3, 6),
])
def test_order_preserving_reversers_are_fixed_point_free(build):
    wm = build()
    for w in wm.witnesses:
        if w.relation == "reverses" and w.witness.orientation > 0:
            assert is_fixed_point_free(w.witness, GRID10)


@pytest.mark.parametrize("F", [Negate(), Affine(-2.0, 0.0), Affine(-0.5, 3.0)])
def test_involutive_majorant(F):
    tau = involutive_majorant(F, 1.0)
    assert check_involution(tau, GRID10, 1e-9).passed
    assert check_dominates(tau, F, GRID10, 0.5).passed
    (qt,) = fixed_points(tau, -20, 20)
    (qf,) = fixed_points(F, -20, 20)
    assert qt > qf


def test_involutive_majorant_rejects_preserving():
    with pytest.raises(ValueError):
        involutive_majorant(Identity())
    with pytest.raises(ValueError):
        involutive_majorant(Negate(), gap=0.0)


def test_sternberg_examples():
    assert isinstance(sternberg_conjugator(Translate(1.0)), Identity)
    m = Affine(1.0, 0.5)
    k = sternberg_conjugator(m)
    assert sternberg_report(m, k).sup_error < 1e-8
    assert orientation(k) == "preserving"


def test_sternberg_descending_map():
    m = Affine(1.0, -0.7)
    k = sternberg_conjugator(m)
    rep = sternberg_report(m, k)
    assert rep.passed and rep.sup_error < 1e-8


def test_sternberg_rejects_fixed_points():
    with pytest.raises(ValueError):
        sternberg_conjugator(BumpSeed(0.3))
    with pytest.raises(ValueError):
        sternberg_conjugator(Negate())


def test_reference_pair():
    pair = reference_reversible_pair()
    f, g, k, u = pair
    assert check_reverses(k, g, (-6.0, 6.0, 2001), 1e-8).passed
    assert check_reverses(Translate(1.0), f, GRID10, 1e-9).passed
    assert is_fixed_point_free(u, GRID10)
    assert min_displacement(u, GRID10)[0] > 0
    x = np.linspace(*GRID10)
    assert np.all(f(x) > g(x))
    assert 0.5 < pair.a < float(f(0.5))
    k_u = sternberg_conjugator(u)
    assert sternberg_report(u, k_u).sup_error < 1e-8


def test_witnessed_map_check_reruns():
    wm = build_reversible(BumpSeed(0.2))
    assert isinstance(wm, WitnessedMap)
    assert [r.passed for r in wm.check()] == [True] * len(wm.witnesses)


def test_construction_error_is_runtime_error():
    assert issubclass(ConstructionError, RuntimeError)
