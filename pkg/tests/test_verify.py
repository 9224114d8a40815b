import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from revdiff.constructions import build_example_iv, build_reversible, sternberg_conjugator
from revdiff.smoothmap import Affine, BumpSeed, Identity, Negate, Translate, compose, inverse
from revdiff.verify import (
    CheckReport,
    check_commutation,
    check_conjugation,
    check_dominates,
    check_involution,
    check_reverses,
    check_wave,
    classify_order_reversing,
    is_fixed_point_free,
    reverser_fixed_point_audit,
)

GRID10 = (-10.0, 10.0, 2001)


@pytest.fixture(scope="module")
def f():
    return build_reversible(BumpSeed(0.3)).map


def test_reverses_examples(f):
    assert check_reverses(Translate(1.0), f, GRID10, 1e-9).passed
    assert check_reverses(Identity(), Identity()).sup_error == 0.0
    r = check_reverses(Translate(1.0), Translate(1.0))
    assert not r.passed and r.sup_error == pytest.approx(2.0)


def test_involution_examples():
    assert check_involution(Negate()).sup_error == 0.0
    assert check_involution(Affine(-1, 2)).sup_error < 1e-15
    assert not check_involution(Affine(2, 0)).passed


def test_conjugation_examples():
    m = Affine(1, 0.5)
    assert check_conjugation(sternberg_conjugator(m), m, Translate(1.0), tol=1e-8).passed
    assert check_conjugation(Identity(), m, m).sup_error == 0.0
    r = check_conjugation(Identity(), Translate(1.0), Translate(2.0))
    assert not r.passed and r.sup_error == pytest.approx(1.0)


def test_wave_examples(f):
    assert check_wave(f, GRID10, 1e-9).passed
    assert check_wave(Identity()).sup_error == 0.0
    r = check_wave(Translate(1.0))
    assert not r.passed and r.sup_error == pytest.approx(2.0)


def test_commutation_examples(f):
    assert check_commutation(f, 2.0, GRID10, 1e-12).passed
    assert check_commutation(Translate(0.7), 1.3).sup_error < 1e-15
    assert not check_commutation(BumpSeed(0.3), 2.0).passed


def test_dominates():
    assert check_dominates(Translate(1.0), Identity(), margin=0.5).passed
    assert not check_dominates(Identity(), Translate(1.0)).passed


def test_audit_examples(f):
    assert reverser_fixed_point_audit(Translate(1.0), f).passed
    assert reverser_fixed_point_audit(Identity(), Identity()).passed
    # synthetic violation: a reverser with fixed points paired with f != id,
    # without running the reversal check first
    assert not reverser_fixed_point_audit(Identity(), Translate(1.0)).passed
    assert not reverser_fixed_point_audit(Affine(2.0, 0.0), f).passed


def test_classify_order_reversing():
    assert classify_order_reversing(Negate())["reversible"]
    tau = build_example_iv(BumpSeed(0.3)).witnesses[0].witness
    assert classify_order_reversing(tau, (-8.0, 8.0, 2001))["reversible"]
    assert not classify_order_reversing(Affine(-2, 0))["reversible"]
    with pytest.raises(ValueError):
        classify_order_reversing(Identity())


def test_report_is_deterministic_and_serialisable(f):
    a = check_reverses(Translate(1.0), f, GRID10)
    b = check_reverses(Translate(1.0), f, GRID10)
    assert a == b and a.to_json() == b.to_json()
    d = json.loads(a.to_json())
    assert d["passed"] is True and d["points"] == 2001
    assert a.passed == (a.sup_error <= a.tol)


def test_worst_point_is_leftmost():
    r = check_involution(Affine(2, 0), (-1.0, 1.0, 5))
    assert r.worst_x == -1.0
    r = check_wave(Translate(1.0), (-1.0, 1.0, 5))
    assert r.worst_x == -1.0


def test_nan_counts_as_failure():
    class Broken(Identity):
        def _eval(self, x):
            return np.where(x > 0, np.nan, x)

    r = check_involution(Broken())
    assert not r.passed and r.sup_error == np.inf


def test_wave_and_reverses_agree(f):
    for g in (f, Identity(), Translate(1.0), BumpSeed(0.3), compose(f, BumpSeed(0.2))):
        assert check_wave(g).passed == check_reverses(Translate(1.0), g).passed


def test_fixed_point_free():
    assert is_fixed_point_free(Translate(0.1))
    assert not is_fixed_point_free(BumpSeed(0.3))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 2.0), st.booleans(), st.floats(-3.0, 3.0))
def test_conjugation_covariance(slope, flipped, offset):
    f = build_reversible(BumpSeed(0.3)).map
    h = Translate(1.0)
    tol = 1e-9
    assert check_reverses(h, f, tol=tol).passed
    u = Affine(-slope if flipped else slope, offset)
    ui = inverse(u)
    assert check_reverses(compose(u, h, ui), compose(u, f, ui), tol=10 * tol).passed


def test_report_str():
    r = CheckReport("x", -1.0, 1.0, 3, 1e-9, 0.5, 0.0, False)
    assert str(r).startswith("FAIL x")
    assert not r
