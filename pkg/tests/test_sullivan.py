import random
from fractions import Fraction

import pytest

from torelli.labute import labute_graded_dims
from torelli.linalg import vec_add_scaled
from torelli.mcg import Identity, TwistLeaf, builtin_separating_twist, depth_report
from torelli.sullivan import (MasseyError, enumerate_basis_masseys,
                              formality_verdict, h1_and_cup, massey_fixture_model,
                              minimal_model, obstruction_certificate,
                              obstruction_from_depth, triple_massey, wedge_vectors)
from torelli.torus import labute_graded_algebra, mapping_torus_algebra
from torelli.words import SurfaceGroup

G2 = SurfaceGroup(2)
TC = builtin_separating_twist(G2)


def one(k):
    return {k: Fraction(1)}


def d_squared_oracle(model, algebra):
    """Independent d^2 = 0 oracle: evaluate the Jacobi identity directly on
    the structure constants instead of expanding wedge products."""
    dim = algebra.dimension
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                acc = {}
                vec_add_scaled(acc, _bk(algebra, algebra.bracket(i, j), k), 1)
                vec_add_scaled(acc, _bk(algebra, algebra.bracket(j, k), i), 1)
                vec_add_scaled(acc, _bk(algebra, {kk: -c for kk, c in algebra.bracket(i, k).items()}, j), 1)
                if acc:
                    return False
    return True


def _bk(algebra, vec, k):
    out = {}
    for i, c in vec.items():
        vec_add_scaled(out, algebra.bracket(i, k), c)
    return out


def test_abelian_model_has_zero_differential():
    A = mapping_torus_algebra(Identity(), G2, 2)
    model = minimal_model(A)
    surface_duals = [k for k, w in enumerate(model.weights) if w == 1]
    # degree-1 duals are closed; the only differentials are on weight-2 duals
    for k in surface_duals:
        assert not model.diff[k]


def test_class2_surface_model():
    alg = labute_graded_algebra(2, 2)
    model = minimal_model(alg)
    model.verify()
    weight2 = [k for k, w in enumerate(model.weights) if w == 2]
    assert len(weight2) == 5
    for k in weight2:
        assert model.diff[k]  # dual quadratic forms
    assert d_squared_oracle(model, alg)


def test_id_model_s_t_closed():
    A = mapping_torus_algebra(Identity(), G2, 3)
    model = minimal_model(A)
    for name in ("s", "t"):
        k = model.names.index(name)
        assert not model.diff[k]


def test_weight_compatibility_filtered():
    A = mapping_torus_algebra(TwistLeaf(TC), G2, 4)
    model = minimal_model(A)
    for k in range(model.n_generators):
        for (i, j) in model.diff[k]:
            assert model.weights[i] + model.weights[j] <= model.weights[k]


def test_h1_and_cup_twist_case():
    model = minimal_model(mapping_torus_algebra(TwistLeaf(TC), G2, 4))
    coh = h1_and_cup(model)
    assert coh.b1 == 6  # 2g + 2
    assert coh.surface_block_kernel_dim == labute_graded_dims(2, 2)[1] == 5
    s = one(model.names.index("s"))
    t = one(model.names.index("t"))
    assert coh.cup(s, t)  # s^t survives in H^2


def test_massey_fixture_hand_oracle():
    model = massey_fixture_model()
    r = triple_massey(model, one(0), one(0), one(1))
    assert r.representative == {(0, 2): Fraction(1)}
    assert r.indeterminacy_basis == []
    assert not r.vanishes


def test_abelian_model_masseys_vanish():
    # genuinely abelian model: the class-1 quotient extended by s, t; d = 0
    from torelli.torus import build_mapping_torus_algebra
    abelian = build_mapping_torus_algebra(labute_graded_algebra(2, 1), {}, True)
    model = minimal_model(abelian)
    assert all(not d for d in model.diff)
    coh = h1_and_cup(model)
    results = enumerate_basis_masseys(model, coh)
    assert results and all(r.vanishes for r in results)


def test_identity_masseys_vanish_at_class_three():
    model = minimal_model(mapping_torus_algebra(Identity(), G2, 3))
    coh = h1_and_cup(model)
    results = enumerate_basis_masseys(model, coh)
    assert results and all(r.vanishes for r in results)


def test_undefined_product_raises():
    model = minimal_model(mapping_torus_algebra(TwistLeaf(TC), G2, 4))
    coh = h1_and_cup(model)
    s = one(model.names.index("s"))
    t = one(model.names.index("t"))
    with pytest.raises(MasseyError):
        triple_massey(model, s, t, s, coh)  # s u t != 0


def test_massey_closedness_requirement():
    model = minimal_model(mapping_torus_algebra(TwistLeaf(TC), G2, 4))
    weight2 = [k for k, w in enumerate(model.weights) if w == 2][0]
    with pytest.raises(MasseyError):
        triple_massey(model, one(weight2), one(0), one(1))


def test_all_twist_masseys_vanish_and_are_stable():
    model = minimal_model(mapping_torus_algebra(TwistLeaf(TC), G2, 4))
    coh = h1_and_cup(model)
    base = enumerate_basis_masseys(model, coh)
    assert len(base) > 0
    assert all(r.vanishes for r in base)
    for seed in (3, 4):
        again = enumerate_basis_masseys(model, coh, rng=random.Random(seed))
        assert [r.vanishes for r in again] == [r.vanishes for r in base]


def test_obstruction_certificate_twist():
    ob = obstruction_certificate(TwistLeaf(TC), G2, 4)
    assert ob.degree == 3
    assert ob.generator == "a2"  # first conjugated-handle generator
    assert any(ob.coordinates)


def test_obstruction_certificate_identity():
    assert obstruction_certificate(Identity(), G2, 4) is None


def test_formality_verdict_twist():
    v = formality_verdict(TwistLeaf(TC), G2, 4, model_class=4)
    assert v.headline() == "(1,3)-formal, not 1-formal"
    assert v.not_one_formal
    assert v.partial_formality_class == 3
    assert v.b1 == 6
    assert v.betti_asserted == (1, 6, 10, 6, 1)
    assert v.obstruction.degree == 3


def test_formality_verdict_identity():
    v = formality_verdict(Identity(), G2, 4, model_class=3)
    assert not v.not_one_formal
    assert v.obstruction is None
    assert v.partial_formality_class == 4
    assert "no obstruction" in v.headline()


def test_cup_comparison_twist_vs_identity():
    twist = h1_and_cup(minimal_model(mapping_torus_algebra(TwistLeaf(TC), G2, 4)))
    ident = h1_and_cup(minimal_model(mapping_torus_algebra(Identity(), G2, 4)))
    assert twist.b1 == ident.b1
    assert twist.cup_rank == ident.cup_rank
    assert twist.cup_kernel_dim == ident.cup_kernel_dim


def test_model_export_format():
    model = minimal_model(mapping_torus_algebra(TwistLeaf(TC), G2, 3))
    lines = model.export_lines()
    assert lines[0].startswith("genus 2, class 3, dims ")
    assert lines == model.export_lines()
    gen_lines = lines[1:1 + model.n_generators]
    assert gen_lines[0].split()[1] == "1"
    assert any(ln.startswith("d ") for ln in lines)


def test_wedge_antisymmetry():
    x, y = {0: Fraction(2)}, {1: Fraction(3)}
    assert wedge_vectors(x, y) == {(0, 1): Fraction(6)}
    assert wedge_vectors(y, x) == {(0, 1): Fraction(-6)}
    assert wedge_vectors(x, x) == {}
