import random

import pytest

from torelli.labute import normal_form
from torelli.series import magnus_expand
from torelli.words import (GroupWord, SurfaceGroup, WordError, free_reduce,
                           group_commutator, invert)

G2 = SurfaceGroup(2)


def w(text, G=G2):
    return G.parse_word(text)


def test_free_reduce_cancellation():
    assert free_reduce([1, -1]) == ()
    assert free_reduce([1, 2, -2, 3]) == (1, 3)


def test_relator_already_reduced():
    rel = G2.relator
    assert len(rel) == 8
    assert free_reduce(rel.letters) == rel.letters


def test_free_reduce_idempotent():
    rng = random.Random(0)
    for _ in range(50):
        letters = [rng.choice([-1, 1]) * rng.randint(1, 4) for _ in range(20)]
        once = free_reduce(letters)
        assert free_reduce(once) == once


def test_commutator_definition():
    assert group_commutator(w("a1"), w("b1")) == w("a1 b1 a1^-1 b1^-1")


def test_self_commutator_trivial():
    x = w("a1 b2 a2^-1")
    assert group_commutator(x, x).is_identity()
    assert group_commutator(GroupWord(), w("b1")).is_identity()


def test_invert():
    assert invert(w("a1 b2")) == w("b2^-1 a1^-1")
    assert invert(GroupWord()).is_identity()
    assert (invert(G2.relator) * G2.relator).is_identity()
    x = w("a1 b1 a2^-1 b2")
    assert invert(invert(x)) == x


def test_letter_zero_rejected():
    with pytest.raises(WordError):
        free_reduce([1, 0])


def test_out_of_range_letters_rejected():
    with pytest.raises(WordError):
        G2.check_letters((5,))
    with pytest.raises(WordError):
        G2.parse_word("a3")


def test_dehn_relator_trivial():
    assert G2.dehn_is_trivial(G2.relator)
    for g in (3, 4):
        G = SurfaceGroup(g)
        assert G.dehn_is_trivial(G.relator)


def test_dehn_generator_nontrivial():
    assert not G2.dehn_is_trivial(w("a1"))


def test_dehn_cross_handle_commutator_nontrivial():
    # oracle: the Magnus degree-2 term A1 B2 - B2 A1 is nonzero in normal form
    c = group_commutator(w("a1"), w("b2"))
    s = normal_form(magnus_expand(c, 3, 4), G2)
    assert s.degree_part(2) == {(0, 3): 1, (3, 0): -1}
    assert not G2.dehn_is_trivial(c)


def test_dehn_word_times_inverse_trivial():
    rng = random.Random(1)
    for _ in range(25):
        word = GroupWord.of([rng.choice([-1, 1]) * rng.randint(1, 4)
                             for _ in range(rng.randint(0, 14))])
        assert G2.dehn_is_trivial(word * word.inverse())
        conj = G2.relator * word * G2.relator.inverse() * word.inverse()
        # commutator with the relator is trivial in the group
        assert G2.dehn_is_trivial(conj)


def test_nonzero_abelianization_implies_nontrivial():
    rng = random.Random(2)
    for _ in range(40):
        word = GroupWord.of([rng.choice([-1, 1]) * rng.randint(1, 4)
                             for _ in range(rng.randint(1, 12))])
        if any(G2.abelianization(word)):
            assert not G2.dehn_is_trivial(word)


def test_dehn_magnus_cross_oracle():
    # Magnus nontriviality implies group nontriviality at class 6
    rng = random.Random(3)
    for _ in range(40):
        word = GroupWord.of([rng.choice([-1, 1]) * rng.randint(1, 4)
                             for _ in range(rng.randint(1, 12))])
        s = normal_form(magnus_expand(word, 6, 4), G2)
        if not s.is_one():
            assert not G2.dehn_is_trivial(word)
        if G2.dehn_is_trivial(word):
            assert s.is_one()


def test_dehn_shorten_preserves_element():
    rng = random.Random(4)
    for _ in range(20):
        word = GroupWord.of([rng.choice([-1, 1]) * rng.randint(1, 4)
                             for _ in range(rng.randint(0, 10))])
        padded = word * G2.relator * word.inverse() * word  # same element as `word`
        short = G2.dehn_shorten(padded)
        assert len(short) <= len(padded)
        assert G2.dehn_is_trivial(short * word.inverse())


def test_parse_format_round_trip():
    text = "a1 b1^-1 a2 b2^-1"
    assert G2.format_word(w(text)) == text
    assert G2.format_word(GroupWord()) == "1"
    with pytest.raises(WordError):
        G2.parse_word("a1^2")
    with pytest.raises(WordError):
        G2.parse_word("c1")


def test_intersection_form():
    m = G2.intersection_form
    n = G2.n_generators
    for i in range(n):
        for j in range(n):
            assert m[i][j] == -m[j][i]
    # block pairing a_i . b_i = +1
    assert m[0][1] == 1 and m[2][3] == 1
    # nondegenerate: every row has a nonzero entry
    assert all(any(row) for row in m)


def test_genus_validation():
    with pytest.raises(WordError):
        SurfaceGroup(1)
