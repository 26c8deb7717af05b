from fractions import Fraction

import pytest

from torelli.labute import labute_graded_dims
from torelli.mcg import (Bracket, Identity, TwistError, TwistLeaf,
                         builtin_separating_twist, depth_report,
                         make_separating_twist)
from torelli.torus import (algebra_invariants, build_mapping_torus_algebra,
                           exp_nilpotent, filtered_basis, labute_graded_algebra,
                           log_unipotent, mapping_torus_algebra, mat_add,
                           mat_equal, mat_identity, mat_inverse_unipotent,
                           mat_mul, phi_matrix)
from torelli.words import SurfaceGroup

G2 = SurfaceGroup(2)
TC = builtin_separating_twist(G2)


def test_filtered_basis_triangular():
    fb = filtered_basis(2, 3)
    assert fb.dimension == 4 + 5 + 16
    for idx in range(fb.dimension):
        coords = fb.coordinates(fb.vectors[idx])
        assert all(c == (1 if k == idx else 0) for k, c in enumerate(coords))


def test_phi_identity_word():
    fb = filtered_basis(2, 3)
    assert mat_equal(phi_matrix(Identity(), G2, 3), mat_identity(fb.dimension))


def test_phi_tc_block_structure():
    fb = filtered_basis(2, 3)
    M = phi_matrix(TwistLeaf(TC), G2, 3)
    N = mat_add(M, mat_identity(fb.dimension), -1)
    for i, row in N.items():
        for j in row:
            assert fb.degrees[i] == 3 and fb.degrees[j] == 1
            # only conjugated-handle degree-1 sources feed degree 3
            assert fb.labels[j] in ("A2", "B2")


def test_phi_square_shift():
    # (M - I)^2 entries only in blocks shifted by >= 2 (depth - 1) degrees
    fb = filtered_basis(2, 5)
    M = phi_matrix(TwistLeaf(TC), G2, 5)
    N = mat_add(M, mat_identity(fb.dimension), -1)
    N2 = mat_mul(N, N)
    for i, row in N2.items():
        for j in row:
            assert fb.degrees[i] - fb.degrees[j] >= 4


def test_log_unipotent_examples():
    assert log_unipotent(mat_identity(3), 3) == {}
    jordan = {0: {0: Fraction(1), 1: Fraction(1)}, 1: {1: Fraction(1)}}
    D = log_unipotent(jordan, 2)
    assert D == {0: {1: Fraction(1)}}
    with pytest.raises(Exception):
        log_unipotent({0: {0: Fraction(2)}}, 1)


def test_exp_log_round_trip_phi():
    fb = filtered_basis(2, 4)
    M = phi_matrix(TwistLeaf(TC), G2, 4)
    D = log_unipotent(M, fb.dimension)
    assert mat_equal(exp_nilpotent(D, fb.dimension), M)


def test_phi_functoriality_bracket():
    tD = make_separating_twist(G2, "tD", G2.handle_commutator(2), {2})
    cls = 4
    dim = filtered_basis(2, cls).dimension
    Mf = phi_matrix(TwistLeaf(TC), G2, cls)
    Mg = phi_matrix(TwistLeaf(tD), G2, cls)
    Mb = phi_matrix(Bracket(TwistLeaf(TC), TwistLeaf(tD)), G2, cls)
    expect = mat_mul(mat_mul(Mf, Mg),
                     mat_mul(mat_inverse_unipotent(Mf, dim),
                             mat_inverse_unipotent(Mg, dim)))
    assert mat_equal(Mb, expect)


def test_phi_is_lie_automorphism():
    fb = filtered_basis(2, 4)
    alg = fb.algebra()
    M = phi_matrix(TwistLeaf(TC), G2, 4)
    cols = [{k: v for k, v in ((r, M.get(r, {}).get(j)) for r in range(fb.dimension)) if v}
            for j in range(fb.dimension)]
    for (i, j), entry in sorted(fb.bracket_constants.items())[:80]:
        lhs = {}
        for k, c in entry.items():
            for r, v in cols[k].items():
                w = lhs.get(r, 0) + c * v
                if w:
                    lhs[r] = w
                else:
                    del lhs[r]
        assert lhs == alg.bracket_vectors(cols[i], cols[j]), (i, j)


def test_identity_mapping_torus_is_product():
    A = mapping_torus_algebra(Identity(), G2, 4)
    assert not A.derivation
    assert A.dimension == sum(labute_graded_dims(2, 4)) + 2
    inv = algebra_invariants(A)
    assert inv["s_central"] is True
    assert inv["ad_s_rank_profile"] == []
    # s and t both central: they bracket to zero with everything
    s_idx, t_idx = A.labels.index("s"), A.labels.index("t")
    for j in range(A.dimension):
        assert A.bracket(s_idx, j) == {}
        assert A.bracket(t_idx, j) == {}


def test_twist_mapping_torus():
    A = mapping_torus_algebra(TwistLeaf(TC), G2, 4)
    assert A.dimension == 72
    inv = algebra_invariants(A)
    assert inv["s_central"] is False
    assert inv["ad_s_rank_profile"] and inv["ad_s_rank_profile"][0] > 0
    # top graded degree sits in the center of the truncated algebra
    top = [i for i, d in enumerate(A.degrees) if d == 4]
    rows = []
    for i in top:
        for j in range(A.dimension):
            assert A.bracket(i, j) == {}


def test_s_bracket_matches_leading_term():
    # [s, a2-vector] at class 4 is the degree-3 leading element of the twist
    A = mapping_torus_algebra(TwistLeaf(TC), G2, 4)
    fb = filtered_basis(2, 4)
    rep = depth_report(TwistLeaf(TC), G2, 4)
    lead = {p.generator: p for p in rep.per_generator}["a2"]
    s_idx = A.labels.index("s")
    j = fb.labels.index("A2")
    got = A.bracket(s_idx, j)
    deg3 = {k - fb.indices_of_degree(3)[0]: c for k, c in got.items()
            if fb.degrees[k] == 3}
    expect = {i: Fraction(c) for i, c in enumerate(lead.coordinates) if c}
    assert deg3 == expect


def test_leibniz_guard_rejects_bad_derivation():
    from torelli.mcg import InternalInvariantError
    base = filtered_basis(2, 3).algebra()
    # a map that does not raise the filtration degree must be rejected
    bad = {0: {1: Fraction(1)}}
    with pytest.raises(InternalInvariantError):
        build_mapping_torus_algebra(base, bad, True)


def test_jacobi_fault_injection():
    from torelli.mcg import InternalInvariantError
    import copy
    alg = copy.deepcopy(labute_graded_algebra(2, 3))
    key = sorted(alg.brackets)[0]
    k0 = sorted(alg.brackets[key])[0]
    alg.brackets[key][k0] += 1
    with pytest.raises(InternalInvariantError):
        alg.check_jacobi()


def test_graded_algebra_strictness():
    alg = labute_graded_algebra(2, 4)
    alg.check_grading()
    for (i, j), entry in alg.brackets.items():
        for k in entry:
            assert alg.degrees[k] == alg.degrees[i] + alg.degrees[j]


def test_non_torelli_mapping_torus_rejected():
    from torelli.mcg import TwistAutomorphism
    images = [G2.parse_word(n) for n in ("a2", "b2", "a1", "b1")]
    fake = TwistAutomorphism("swap", G2, G2.handle_commutator(1), 1,
                             frozenset(), tuple(images))
    with pytest.raises(TwistError):
        phi_matrix(TwistLeaf(fake), G2, 3)


def test_algebra_dump_canonical():
    A = mapping_torus_algebra(TwistLeaf(TC), G2, 3)
    lines = A.dump_lines()
    assert lines == A.dump_lines()
    quads = [ln for ln in lines if ln.startswith("[")]
    keys = [tuple(int(x) for x in ln[1:-1].split(",")[:3]) for ln in quads]
    assert keys == sorted(keys)
    assert len(keys) == len(set(keys))
