"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.  Every line shows the measured value
next to the threshold it is compared against.
"""

import random
import time
from fractions import Fraction

import numpy as np
import pytest

from fd import one_sided
from revdiff import series as ser
from revdiff.constructions import (
    build_example_iv,
    build_reversible,
    build_signature_map,
    reference_reversible_pair,
    sternberg_conjugator,
)
from revdiff.decompose import (
    four_involutions,
    four_reversibles,
    three_involutions,
    two_reversibles_fixed_point_free,
    two_strongly_reversible,
)
from revdiff.series import Obstruction, Series
from revdiff.signature import HALF_TURN_WORD, classify
from revdiff.smoothmap import Affine, BumpSeed, Identity, Negate, Translate, compose, jet_at
from revdiff.verify import (
    check_conjugation,
    check_involution,
    check_reverses,
    check_wave,
    reverser_fixed_point_audit,
)

GRID10 = (-10.0, 10.0, 2001)
GRID8 = (-8.0, 8.0, 2001)
GRID5 = (-5.0, 5.0, 2001)
ORDER = 16
# one-sided stencils are tried at each step; truncation wins above, roundoff below
FD_STEPS = tuple(2.0 ** -e for e in range(8, 13))


def _rev():
    return build_reversible(BumpSeed(0.3)).map


def _worst(reports):
    return max(r.sup_error for r in reports)


# -- criteria; each returns (passed, detail) -----------------------------------

def criterion_1():
    t = time.perf_counter()
    f = _rev()
    wave = check_wave(f, GRID10, 1e-9)
    n = np.arange(-10, 11, dtype=float)
    fix = float(np.max(np.abs(f(n) - n)))
    dt = time.perf_counter() - t
    ok = wave.passed and fix < 1e-10 and dt < 5.0
    return ok, f"wave sup {wave.sup_error:.2e} (< 1e-9), integers {fix:.2e} (< 1e-10), {dt:.2f}s (< 5s)"


def criterion_2():
    t = time.perf_counter()
    rep = classify(HALF_TURN_WORD)
    dt = time.perf_counter() - t
    ok = rep["shifts"] == [6] and rep["centers"] == [] and dt < 1.0
    return ok, f"shifts {rep['shifts']}, centers {rep['centers']}, {dt * 1e3:.1f}ms (< 1s)"


def criterion_3():
    wm = build_example_iv(BumpSeed(0.3))
    tau = wm.witnesses[0].witness
    reps = [check_reverses(Translate(2.0), wm.map, GRID8, 1e-9),
            check_reverses(tau, wm.map, GRID8, 1e-9),
            check_involution(tau, GRID8, 1e-9)]
    return all(reps), f"worst of 3 checks {_worst(reps):.2e} (< 1e-9)"


def _random_series(rng, order):
    lead = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
    return Series([lead] + [Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(order - 1)])


def criterion_4():
    rng = random.Random(2024)
    t = time.perf_counter()
    ident = ser.identity(ORDER)
    bad = 0
    for _ in range(200):
        s, u = _random_series(rng, ORDER), _random_series(rng, ORDER)
        si = ser.invert(s)
        bad += ser.compose(s, si) != ident or ser.compose(si, s) != ident
        bad += ser.invert(ser.compose(s, u)) != ser.compose(ser.invert(u), si)
        bad += ser.compose(ser.compose(s, u), si) != ser.compose(s, ser.compose(u, si))
    dt = time.perf_counter() - t
    return bad == 0 and dt < 10.0, f"{bad} failures in 200 series, {dt:.2f}s (< 10s)"


def _reversible_series(rng, p, order):
    # A (-X) A^-1 (-X) is reversed by -X and has lowest order p when p is even
    a = Series([Fraction(1)] + [Fraction(0)] * (p - 2) + [Fraction(rng.randint(1, 4), rng.randint(1, 3))]
               + [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(order - p)])
    neg = ser.negation(order)
    return ser.compose(a, ser.compose(neg, ser.compose(ser.invert(a), neg)))


def criterion_5():
    rng = random.Random(7)
    ok_even = ok_odd = 0
    for i in range(50):
        p = (2, 4, 6)[i % 3]
        s = _reversible_series(rng, p, ORDER)
        t = ser.solve_reverser(s, -1)
        ok_even += (ser.lowest_order(s) == p and isinstance(t, Series) and ser.is_reversed_by(t, s)
                    and ser.compose(t, t) == ser.identity(ORDER))
    for i in range(50):
        p = (3, 5)[i % 2]
        s = Series([Fraction(1)] + [Fraction(0)] * (p - 2) + [Fraction(rng.randint(1, 4), rng.randint(1, 3))]
                   + [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(ORDER - p)])
        ok_odd += isinstance(ser.solve_reverser(s, -1), Obstruction)
    fails = 100 - ok_even - ok_odd
    return fails == 0, f"even p: {ok_even}/50 involutive reversers, odd p: {ok_odd}/50 obstructions"


def criterion_6():
    good = []
    for n in (8, 16):
        neg = ser.negation(n)
        good.append(ser.compose(neg, ser.compose(ser.mobius(1, n), neg)) == ser.mobius(-1, n))
    return all(good), f"exact at orders 8, 16: {good}"


def joint_gaps(k, h):
    """Largest left/right difference of derivatives 1..3 at both ends of the fundamental domain."""
    gaps = []
    for x0 in (k.base, k._top):
        for d in (1, 2, 3):
            gaps.append(abs(one_sided(k, x0, d, h, "left") - one_sided(k, x0, d, h, "right")))
    return max(gaps)


def jet_gaps(k, order=3):
    gaps = []
    for x0 in (k.base, k._top):
        a = jet_at(k, x0, order, "left").series.coeffs
        b = jet_at(k, x0, order, "right").series.coeffs
        gaps.append(max(abs(x - y) for x, y in zip(a, b)))
    return max(gaps)


def criterion_7():
    ok, parts = True, []
    for name, m in (("Affine(1,0.5)", Affine(1.0, 0.5)), ("u*", reference_reversible_pair().u)):
        k = sternberg_conjugator(m)
        conj = check_conjugation(k, m, Translate(1.0), GRID5, 1e-8)
        fd, h = min((joint_gaps(k, h), h) for h in FD_STEPS)
        ok &= conj.passed and fd < 1e-5
        parts.append(f"{name}: conj {conj.sup_error:.2e} (< 1e-8), fd jump {fd:.2e} at h=2^{int(np.log2(h))} (< 1e-5), "
                     f"jet jump {jet_gaps(k):.1e}")
    return ok, "; ".join(parts)


def _decomp_line(d, t0):
    reps = d.verify(GRID5)
    return all(reps), _worst(reps), time.perf_counter() - t0


def criterion_8():
    rev = _rev()
    cases = [("-f", three_involutions, compose(Negate(), rev)),
             ("x+1", four_involutions, Translate(1.0)),
             ("f", four_involutions, rev)]
    ok, parts = True, []
    for name, fn, f in cases:
        t0 = time.perf_counter()
        passed, err, dt = _decomp_line(fn(f), t0)
        ok &= passed and dt < 30.0
        parts.append(f"{name}: {err:.1e} {dt:.1f}s")
    return ok, ", ".join(parts) + " (involution < 1e-6, product < 1e-5, < 30s each)"


def criterion_9():
    ok, parts = True, []
    for name, m in (("x+1", Translate(1.0)), ("x-0.7", Affine(1.0, -0.7))):
        passed, err, _ = _decomp_line(two_reversibles_fixed_point_free(m), time.perf_counter())
        ok &= passed
        parts.append(f"{name}: {err:.1e}")
    return ok, ", ".join(parts) + " (< 1e-5)"


def criterion_10():
    ok, parts = True, []
    for name, f in (("id", Identity()), ("x+3", Affine(1.0, 3.0)), ("f", _rev())):
        p4, e4, _ = _decomp_line(four_reversibles(f), time.perf_counter())
        p2, e2, _ = _decomp_line(two_strongly_reversible(f), time.perf_counter())
        ok &= p4 and p2
        parts.append(f"{name}: 4rev {e4:.1e}, 2sr {e2:.1e}")
    return ok, ", ".join(parts) + " (< 1e-5)"


def _witnessed_pairs():
    rev = build_reversible(BumpSeed(0.3))
    for wm in (rev, build_example_iv(BumpSeed(0.3)), build_signature_map(HALF_TURN_WORD, 0.3, 6)):
        for w in wm.witnesses:
            if w.relation == "reverses":
                yield w.witness, wm.map
    pair = reference_reversible_pair()
    yield pair.k, pair.g
    yield Translate(1.0), pair.f
    for d in (two_reversibles_fixed_point_free(Translate(1.0)), four_reversibles(rev.map)):
        yield from zip(d.witnesses, d.factors)


def criterion_11():
    n = bad = 0
    for h, f in _witnessed_pairs():
        if h.orientation > 0:
            n += 1
            bad += not reverser_fixed_point_audit(h, f, GRID10).passed
    synthetic = reverser_fixed_point_audit(Identity(), Translate(1.0), GRID10)
    ok = bad == 0 and n > 0 and not synthetic.passed
    return ok, f"{n - bad}/{n} order preserving reversers clean, synthetic violation flagged: {not synthetic.passed}"


CRITERIA = [
    (1, "functional equation", criterion_1),
    (2, "signature example", criterion_2),
    (3, "example (iv)", criterion_3),
    (4, "series group laws", criterion_4),
    (5, "formal reverser solver", criterion_5),
    (6, "strong reversal identity", criterion_6),
    (7, "sternberg conjugation", criterion_7),
    (8, "three/four involutions", criterion_8),
    (9, "two reversible factors", criterion_9),
    (10, "four reversible factors", criterion_10),
    (11, "reverser fixed point audit", criterion_11),
]


def line(num, name, fn):
    ok, detail = fn()
    return ok, f"[{'PASS' if ok else 'FAIL'}] {num:2d} {name}: {detail}"


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, name, fn, capsys):
    ok, text = line(num, name, fn)
    with capsys.disabled():
        print("\n" + text)
    assert ok, text


if __name__ == "__main__":
    for c in CRITERIA:
        print(line(*c)[1], flush=True)
