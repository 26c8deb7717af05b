import pytest

from torelli.mcg import (Bracket, Compose, Identity, InternalInvariantError,
                         Inverse, MCGParseError, TwistError, TwistLeaf,
                         builtin_s4_scenario, builtin_separating_twist,
                         depth_report, evaluate, make_separating_twist,
                         parse_mcg_word, torelli_h1_check, validate_twist)
from torelli.words import GroupWord, SurfaceGroup, group_commutator

G2 = SurfaceGroup(2)
TC = builtin_separating_twist(G2)


def test_genus2_twist_images():
    wc = G2.handle_commutator(1)
    assert TC.boundary == wc
    for name in ("a1", "b1"):
        gen = G2.parse_word(name)
        assert TC.apply(gen) == gen
    for name in ("a2", "b2"):
        gen = G2.parse_word(name)
        assert TC.apply(gen) == wc * gen * wc.inverse()


def test_inverse_twist_conjugates_by_inverse():
    inv = TC.inverse_twist()
    wc = TC.boundary
    gen = G2.parse_word("a2")
    assert inv.apply(gen) == wc.inverse() * gen * wc
    # composition of the two is the identity automorphism
    word = Compose(TwistLeaf(TC), TwistLeaf(inv))
    for k in range(1, 5):
        g = G2.generator_word(k)
        assert evaluate(word, g) == g


def test_genus4_based_representative_rotation():
    G = SurfaceGroup(4)
    declared = G.handle_commutator(1) * G.handle_commutator(4)
    t = make_separating_twist(G, "t2", declared, conjugated={2, 3})
    assert t.boundary == G.handle_commutator(4) * G.handle_commutator(1)
    assert validate_twist(t, G)


def test_validate_twist_cases():
    assert validate_twist(TC, G2)

    class Fake:
        def __init__(self, images):
            self.images = images

        def apply(self, w):
            out = GroupWord()
            for x in w.letters:
                img = self.images[abs(x) - 1]
                out = out * (img if x > 0 else img.inverse())
            return out

    # a1 -> a2, others fixed: the relator image (a2,b1)(a2,b2) is nontrivial.
    # Independent oracle: its degree-2 Magnus normal form is [A2,B1] - [A1,B1].
    swapped = Fake([G2.parse_word("a2"), G2.parse_word("b1"),
                    G2.parse_word("a2"), G2.parse_word("b2")])
    from torelli.labute import normal_form
    from torelli.series import magnus_expand
    image = swapped.apply(G2.relator)
    nf = normal_form(magnus_expand(image, 3, 4), G2)
    assert nf.degree_part(2) == {(2, 1): 1, (1, 2): -1, (0, 1): -1, (1, 0): 1}
    assert not validate_twist(swapped, G2)
    identity = Fake([G2.generator_word(k) for k in range(1, 5)])
    assert validate_twist(identity, G2)


def test_twist_construction_errors():
    with pytest.raises(TwistError):
        make_separating_twist(G2, "bad", G2.handle_commutator(1), {1})
    with pytest.raises(TwistError):
        make_separating_twist(G2, "bad", G2.parse_word("a1 b1"), {2})
    with pytest.raises(TwistError):
        make_separating_twist(
            G2, "bad", G2.handle_commutator(1) * G2.handle_commutator(1), {2})
    with pytest.raises(TwistError):
        make_separating_twist(G2, "bad", G2.handle_commutator(1), {2}, sign=2)


def test_evaluate_examples():
    a1 = G2.parse_word("a1")
    a2 = G2.parse_word("a2")
    assert evaluate(TwistLeaf(TC), a1) == a1
    assert evaluate(TwistLeaf(TC), a2) == TC.boundary * a2 * TC.boundary.inverse()
    selfbracket = Bracket(TwistLeaf(TC), TwistLeaf(TC))
    for k in range(1, 5):
        g = G2.generator_word(k)
        assert evaluate(selfbracket, g) == g
    assert evaluate(Identity(), a2) == a2
    assert evaluate(Inverse(Inverse(TwistLeaf(TC))), a2) == evaluate(TwistLeaf(TC), a2)


def test_picard_lefschetz_identity_all_genera():
    for g in (2, 3, 4):
        G = SurfaceGroup(g)
        t = builtin_separating_twist(G)
        for k in range(1, 2 * g + 1):
            gen = G.generator_word(k)
            img = t.apply(gen)
            if (k + 1) // 2 in t.conjugated:
                assert img * gen.inverse() == group_commutator(t.boundary, gen)
            else:
                assert img == gen


def test_parser():
    twists = {"tC": TC}
    w = parse_mcg_word("[tC, tC^-1]", twists)
    assert isinstance(w, Bracket)
    w = parse_mcg_word("tC tC^-1 (tC)", twists)
    assert isinstance(w, Compose)
    assert parse_mcg_word("Id", twists) == Identity()
    with pytest.raises(MCGParseError):
        parse_mcg_word("unknown", twists)
    with pytest.raises(MCGParseError):
        parse_mcg_word("[tC,]", twists)
    with pytest.raises(MCGParseError):
        parse_mcg_word("tC )", twists)
    with pytest.raises(MCGParseError):
        parse_mcg_word("tC $ tC", twists)


def test_composition_order_regression():
    # "f g" applies g first: [f,g] = f.g.f^-1.g^-1 applied right to left
    t_inv = TwistLeaf(TC.inverse_twist())
    expr = parse_mcg_word("tC tC^-1", {"tC": TC})
    a2 = G2.parse_word("a2")
    assert evaluate(expr, a2) == a2
    manual = Compose(TwistLeaf(TC), t_inv)
    assert evaluate(manual, a2) == a2


def test_depth_tc_is_three():
    rep = depth_report(TwistLeaf(TC), G2, 4)
    assert rep.depth == 3 and rep.exact
    assert rep.torelli
    degrees = {p.generator: p.degree for p in rep.per_generator}
    assert degrees == {"a1": None, "b1": None, "a2": 3, "b2": 3}
    for p in rep.per_generator:
        if p.degree is not None:
            assert any(p.coordinates)


def test_depth_identity_word():
    rep = depth_report(Identity(), G2, 5)
    assert not rep.exact and rep.depth == 5
    assert rep.depth_text == ">= 5"
    # never silently classified trivial: every generator entry is explicit
    assert all(p.degree is None for p in rep.per_generator)


def test_depth_requires_min_class():
    with pytest.raises(ValueError):
        depth_report(TwistLeaf(TC), G2, 2)


def test_bracket_lemma_bound_genus2():
    tD = make_separating_twist(G2, "tD", G2.handle_commutator(2), {2})
    word = Bracket(TwistLeaf(TC), TwistLeaf(tD))
    rep = depth_report(word, G2, 6)
    assert rep.lemma_bound == 5
    assert (not rep.exact and rep.depth == 6) or rep.depth >= 5


def test_builtin_s4():
    G, t1, t2 = builtin_s4_scenario()
    assert G.genus == 4
    for k in (1, 2, 3, 4):  # a1, b1, a2, b2
        gen = G.generator_word(k)
        assert t1.apply(gen) == gen
    for k in (1, 2, 7, 8):  # a1, b1, a4, b4
        gen = G.generator_word(k)
        assert t2.apply(gen) == gen
    assert depth_report(TwistLeaf(t1), G, 4).depth == 3
    assert depth_report(TwistLeaf(t2), G, 4).depth == 3


def test_torelli_h1_block_structure():
    G, t1, t2 = builtin_s4_scenario()
    for word in (TwistLeaf(t1), TwistLeaf(t2),
                 Bracket(TwistLeaf(t1), TwistLeaf(t2)),
                 Compose(TwistLeaf(t1), Inverse(TwistLeaf(t2)))):
        assert torelli_h1_check(word, G)


def test_non_torelli_rejected():
    from torelli.mcg import TwistAutomorphism

    images = [G2.parse_word(n) for n in ("a2", "b2", "a1", "b1")]
    fake = TwistAutomorphism("swap", G2, G2.handle_commutator(1), 1,
                             frozenset(), tuple(images))
    assert not torelli_h1_check(TwistLeaf(fake), G2)
    with pytest.raises(TwistError):
        depth_report(TwistLeaf(fake), G2, 4)
