import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from revdiff.constructions import build_signature_map
from revdiff.signature import (
    HALF_TURN_WORD,
    SigWord,
    centres,
    classify,
    flip,
    is_translation_reversible,
    reflect,
    reflection_compatible_centers,
    shift,
    signature_of,
    translation_shifts,
)
from revdiff.smoothmap import Affine, Identity, Translate, compose


def all_words(n):
    return ["".join(p) for p in itertools.product("+-", repeat=n)]


words = st.text(alphabet="+-", min_size=1, max_size=12)


def test_flip_examples():
    assert str(flip("+-")) == "-+"
    assert str(flip("+++")) == "---"
    assert str(flip(HALF_TURN_WORD)) == "---++-+++--+"


def test_shift_examples():
    assert str(shift("+-", 0)) == "+-"
    assert shift(HALF_TURN_WORD, 12) == SigWord(HALF_TURN_WORD)
    assert shift(HALF_TURN_WORD, 6) == flip(HALF_TURN_WORD)


def test_translation_reversal_examples():
    assert is_translation_reversible(HALF_TURN_WORD, 6)
    assert not is_translation_reversible(HALF_TURN_WORD, 3)
    assert translation_shifts(HALF_TURN_WORD) == [6]
    assert not any(is_translation_reversible("++", k) for k in range(4))


def test_reflection_examples():
    assert reflection_compatible_centers(HALF_TURN_WORD) == []
    # "+-" is a palindrome about the middle of each interval
    assert reflection_compatible_centers("+-") == [Fraction(1, 2), Fraction(3, 2)]
    assert reflection_compatible_centers("+") != []


def test_classify_examples():
    assert classify(HALF_TURN_WORD) == {"word": HALF_TURN_WORD, "length": 12, "shifts": [6], "centers": []}
    r = classify("+-")
    assert r["shifts"] == [1] and r["centers"]
    r = classify("++++")
    assert r["shifts"] == [] and len(r["centers"]) == 8


def test_word_parsing():
    assert str(SigWord("+ − +")) == "+-+"
    assert SigWord((1, -1)) == SigWord("+-")
    with pytest.raises(ValueError):
        SigWord("")
    with pytest.raises(ValueError):
        SigWord("+x")
    with pytest.raises(ValueError):
        reflect("+-", Fraction(1, 3))


def test_signature_of_examples():
    assert str(signature_of(build_signature_map(HALF_TURN_WORD, 0.3, 6).map, 0, 12)) == HALF_TURN_WORD
    assert str(signature_of(build_signature_map("+-", 0.3, 1).map, 0, 2)) == "+-"
    with pytest.raises(ValueError):
        signature_of(Identity(), 0, 4)
    with pytest.raises(ValueError):
        signature_of(Translate(0.5), 0, 4)


@pytest.mark.parametrize("word", ["+", "+-", "++-", "+--+-", "+++--+---++-"])
def test_actions_match_conjugated_maps(word):
    # oracle: read the word of the actually conjugated map
    n = len(word)
    f = build_signature_map(word).map
    for k in range(n):
        g = compose(Translate(k), f, Translate(-k))
        assert signature_of(g, 0, n) == shift(word, k)
    for c in centres(n):
        r = Affine(-1.0, float(2 * c))
        assert signature_of(compose(r, f, r), 0, n) == flip(reflect(word, c))


@pytest.mark.parametrize("n", range(1, 9))
def test_exhaustive_classify_matches_predicates(n):
    for w in all_words(n):
        rep = classify(w)
        assert rep["shifts"] == [k for k in range(n) if shift(w, k) == flip(w)]
        cs = [c for c in centres(n) if all(w[int(2 * c - 1 - j) % n] == w[j] for j in range(n))]
        assert rep["centers"] == [int(c) if c.denominator == 1 else float(c) for c in cs]


@pytest.mark.parametrize("n", range(1, 13))
def test_dihedral_relations(n):
    # reflections are involutions, two reflections make a translation and
    # a translation conjugates a reflection to a reflection
    w = SigWord(HALF_TURN_WORD[:n])
    for c in centres(n):
        assert reflect(reflect(w, c), c) == w
        for d in centres(n):
            assert reflect(reflect(w, c), d) == shift(w, int(2 * (d - c)))
        for k in range(n):
            assert shift(reflect(shift(w, -k), c), k) == reflect(w, c + k)


@given(words)
def test_flip_is_involution(w):
    assert flip(flip(w)) == SigWord(w)


@given(words, st.integers(-20, 20), st.integers(-20, 20))
def test_shift_is_an_action(w, a, b):
    assert shift(w, a + b) == shift(shift(w, a), b)


@given(words, st.integers(0, 11))
def test_reversal_of_inverse(w, k):
    assert is_translation_reversible(w, k) == is_translation_reversible(flip(w), k)


@settings(max_examples=15, deadline=None)
@given(words)
def test_signature_round_trip(w):
    f = build_signature_map(w).map
    assert str(signature_of(f, 0, len(w))) == w
