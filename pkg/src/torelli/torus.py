"""Malcev Lie algebras of symplectized mapping tori.

The class-n Malcev algebra of the surface group is carried by a filtered
basis: group-word realizations gamma of the Labute basis bracketings,
with v_gamma = log of the normalized Magnus expansion of gamma. The
degree-d component of v_gamma is exactly the degree-d Labute basis row, so
the system is triangular and every element of the truncated algebra has
unique coordinates. Brackets computed in the envelope are exact for this
carrier (each lands in filtration degree >= p+q, with equality in the
graded part), and the log of the matrix of a Torelli mapping class is an
exact derivation of it, which is what makes the Leibniz and Jacobi checks
of the extended algebra exact rather than approximate.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

from .labute import labute_basis, labute_graded_dims, normal_form
from .linalg import vec_add_scaled
from .mcg import InternalInvariantError, MCGWord, TwistError, evaluate, torelli_h1_check
from .series import TruncatedSeries, log_truncated, magnus_expand
from .words import GroupWord, SurfaceGroup


# ---------------------------------------------------------------------------
# Sparse matrices over Fraction: {row: {col: value}}
# ---------------------------------------------------------------------------

def mat_identity(dim: int) -> dict:
    return {i: {i: Fraction(1)} for i in range(dim)}

def mat_from_columns(cols: list[list]) -> dict:
    rows: dict[int, dict] = {}
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            if v:
                rows.setdefault(i, {})[j] = Fraction(v)
    return rows

def mat_mul(a: dict, b: dict) -> dict:
    out: dict[int, dict] = {}
    for i, arow in a.items():
        acc: dict[int, Fraction] = {}
        for k, av in arow.items():
            brow = b.get(k)
            if brow:
                for j, bv in brow.items():
                    w = acc.get(j, 0) + av * bv
                    if w:
                        acc[j] = w
                    else:
                        del acc[j]
        if acc:
            out[i] = acc
    return out

def mat_add(a: dict, b: dict, cb=1) -> dict:
    out = {i: dict(r) for i, r in a.items()}
    for i, row in b.items():
        acc = out.setdefault(i, {})
        for j, v in row.items():
            w = acc.get(j, 0) + cb * v
            if w:
                acc[j] = w
            else:
                del acc[j]
        if not acc:
            del out[i]
    return out

def mat_scale(a: dict, c) -> dict:
    if not c:
        return {}
    return {i: {j: c * v for j, v in row.items()} for i, row in a.items()}

def mat_equal(a: dict, b: dict) -> bool:
    return mat_add(a, b, -1) == {}

def mat_entry(a: dict, i: int, j: int):
    return a.get(i, {}).get(j, Fraction(0))

def mat_apply(a: dict, vec: dict) -> dict:
    out: dict[int, Fraction] = {}
    for i, row in a.items():
        acc = 0
        for j, v in row.items():
            c = vec.get(j)
            if c:
                acc += v * c
        if acc:
            out[i] = acc
    return out


def log_unipotent(M: dict, dim: int) -> dict:
    """log of a unipotent matrix: sum (-1)^(k+1) (M-I)^k / k, a finite sum.

    Raises if M - I is not nilpotent within the dimension bound; the exact
    round trip exp(log M) = M is verified before returning.
    """
    N = mat_add(M, mat_identity(dim), -1)
    acc: dict = {}
    P = N
    k = 1
    while P:
        if k > dim:
            raise InternalInvariantError("matrix is not unipotent")
        acc = mat_add(acc, P, Fraction((-1) ** (k + 1), k))
        P = mat_mul(P, N)
        k += 1
    if not mat_equal(exp_nilpotent(acc, dim), M):
        raise InternalInvariantError("exp(log M) != M")
    return acc


def exp_nilpotent(D: dict, dim: int) -> dict:
    acc = mat_identity(dim)
    P = mat_identity(dim)
    fact = 1
    k = 1
    while True:
        P = mat_mul(P, D)
        if not P:
            return acc
        if k > dim:
            raise InternalInvariantError("matrix is not nilpotent")
        fact *= k
        acc = mat_add(acc, P, Fraction(1, fact))
        k += 1


def mat_inverse_unipotent(M: dict, dim: int) -> dict:
    return exp_nilpotent(mat_scale(log_unipotent(M, dim), -1), dim)


# ---------------------------------------------------------------------------
# Filtered basis of the class-n Malcev algebra
# ---------------------------------------------------------------------------

class FilteredBasis:
    """Group-word realizations of the Labute basis with their log expansions."""

    def __init__(self, G: SurfaceGroup, n: int):
        self.group = G
        self.n = n
        self.labels: list[str] = []
        self.degrees: list[int] = []
        self.words: list[GroupWord] = []
        self.vectors: list[TruncatedSeries] = []
        self._by_degree: dict[int, list[int]] = {}
        from .labute import bracket_group_word
        for d in range(1, n + 1):
            basis = labute_basis(G.genus, d)
            for label, tree in zip(basis.labels, basis.trees):
                idx = len(self.labels)
                gamma = bracket_group_word(tree, G)
                v = log_truncated(normal_form(
                    magnus_expand(gamma, n + 1, G.n_generators), G))
                if v.min_degree() != d:
                    raise InternalInvariantError(
                        f"representative of {label} does not start in degree {d}")
                self.labels.append(label)
                self.degrees.append(d)
                self.words.append(gamma)
                self.vectors.append(v)
                self._by_degree.setdefault(d, []).append(idx)

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def indices_of_degree(self, d: int) -> list[int]:
        return self._by_degree.get(d, [])

    def coordinates(self, s: TruncatedSeries) -> list:
        """Coordinates of a log series (constant 0, degrees 1..n) in the basis.

        Solved degree by degree against the triangular system; aborts if the
        series is not in the span (an upstream inconsistency).
        """
        residual = dict(s.terms)
        coords = [Fraction(0)] * self.dimension
        for d in range(1, self.n + 1):
            component = {m: c for m, c in residual.items() if len(m) == d}
            if not component:
                continue
            sol = labute_basis(self.group.genus, d).solve(component)
            if sol is None:
                raise InternalInvariantError(
                    f"degree-{d} component is outside the Labute span")
            for pos, idx in enumerate(self.indices_of_degree(d)):
                c = sol[pos]
                if c:
                    coords[idx] = Fraction(c)
                    for m, v in self.vectors[idx].terms.items():
                        w = residual.get(m, 0) - c * v
                        if w:
                            residual[m] = w
                        else:
                            residual.pop(m, None)
        if any(residual.values()):
            raise InternalInvariantError("coordinate solve left a residual")
        return coords

    @functools.cached_property
    def bracket_constants(self) -> dict:
        """{(i, j): {k: c}} for i < j, computed in the truncated envelope."""
        out: dict[tuple[int, int], dict[int, Fraction]] = {}
        for i in range(self.dimension):
            for j in range(i + 1, self.dimension):
                if self.degrees[i] + self.degrees[j] > self.n:
                    continue
                prod = self.vectors[i] * self.vectors[j] - self.vectors[j] * self.vectors[i]
                coords = self.coordinates(normal_form(prod, self.group))
                entry = {k: c for k, c in enumerate(coords) if c}
                if entry:
                    out[(i, j)] = entry
        return out

    def algebra(self) -> "LieAlgebraData":
        return LieAlgebraData(labels=list(self.labels), degrees=list(self.degrees),
                              brackets=self.bracket_constants, strict_graded=False,
                              genus=self.group.genus, n=self.n)


@functools.lru_cache(maxsize=None)
def filtered_basis(g: int, n: int) -> FilteredBasis:
    return FilteredBasis(SurfaceGroup(g), n)


# ---------------------------------------------------------------------------
# Lie algebra containers
# ---------------------------------------------------------------------------

@dataclass
class LieAlgebraData:
    """Basis-with-structure-constants model of a (graded or filtered) Lie algebra.

    brackets maps (i, j) with i < j to {k: c}; brackets of degrees p, q land
    in degree exactly p + q when strict_graded, and in degrees >= p + q
    otherwise.
    """
    labels: list[str]
    degrees: list[int]
    brackets: dict
    strict_graded: bool
    genus: int
    n: int

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def bracket(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            return self.brackets.get((i, j), {})
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def bracket_vectors(self, x: dict, y: dict) -> dict:
        out: dict[int, Fraction] = {}
        for i, cx in x.items():
            for j, cy in y.items():
                if i == j:
                    continue
                vec_add_scaled(out, self.bracket(i, j), cx * cy)
        return out

    def check_grading(self) -> None:
        for (i, j), entry in self.brackets.items():
            for k in entry:
                lhs = self.degrees[i] + self.degrees[j]
                ok = self.degrees[k] == lhs if self.strict_graded else self.degrees[k] >= lhs
                if not ok:
                    raise InternalInvariantError(
                        f"bracket [{self.labels[i]},{self.labels[j]}] violates grading")

    def check_jacobi(self) -> None:
        """Exact Jacobi on all basis triples with total weight within class;
        triples of higher weight are vacuous under truncation."""
        dim = self.dimension
        for i in range(dim):
            for j in range(i + 1, dim):
                if self.degrees[i] + self.degrees[j] + 1 > self.n:
                    continue
                bij = self.bracket(i, j)
                for k in range(j, dim):
                    if self.degrees[i] + self.degrees[j] + self.degrees[k] > self.n:
                        continue
                    acc: dict[int, Fraction] = {}
                    vec_add_scaled(acc, self.bracket_vectors(bij, {k: 1}), 1)
                    vec_add_scaled(acc, self.bracket_vectors(self.bracket(j, k), {i: 1}), 1)
                    vec_add_scaled(acc, self.bracket_vectors(self.bracket(k, i), {j: 1}), 1)
                    if acc:
                        raise InternalInvariantError(
                            f"Jacobi fails on ({self.labels[i]},{self.labels[j]},{self.labels[k]})")

    def dump_lines(self) -> list[str]:
        """Canonical dump: basis labels with degrees, then [i,j,k,c] quadruples."""
        lines = [f"{idx} {label} degree {d}"
                 for idx, (label, d) in enumerate(zip(self.labels, self.degrees))]
        quads = []
        for (i, j), entry in self.brackets.items():
            for k, c in entry.items():
                from .series import format_rational
                quads.append((i, j, k, format_rational(c)))
        for q in sorted(quads):
            lines.append(f"[{q[0]},{q[1]},{q[2]},{q[3]}]")
        return lines


@functools.lru_cache(maxsize=None)
def labute_graded_algebra(g: int, n: int) -> LieAlgebraData:
    """The graded Labute algebra gr with strictly graded structure constants."""
    from .labute import normal_form_graded
    G = SurfaceGroup(g)
    labels: list[str] = []
    degrees: list[int] = []
    rows: list[dict] = []
    offsets: dict[int, int] = {}
    for d in range(1, n + 1):
        basis = labute_basis(g, d)
        offsets[d] = len(labels)
        labels.extend(basis.labels)
        degrees.extend([d] * basis.dimension)
        rows.extend(basis.rows)
    brackets: dict = {}
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            dsum = degrees[i] + degrees[j]
            if dsum > n:
                continue
            prod: dict = {}
            for ma, ca in rows[i].items():
                for mb, cb in rows[j].items():
                    for key, c in ((ma + mb, ca * cb), (mb + ma, -ca * cb)):
                        v = prod.get(key, 0) + c
                        if v:
                            prod[key] = v
                        else:
                            del prod[key]
            prod = normal_form_graded(prod, G, dsum)
            sol = labute_basis(g, dsum).solve(prod)
            if sol is None:
                raise InternalInvariantError("graded bracket outside Labute span")
            entry = {offsets[dsum] + k: Fraction(c) for k, c in enumerate(sol) if c}
            if entry:
                brackets[(i, j)] = entry
    alg = LieAlgebraData(labels, degrees, brackets, strict_graded=True, genus=g, n=n)
    alg.check_grading()
    alg.check_jacobi()
    return alg


# ---------------------------------------------------------------------------
# The induced matrix of a Torelli mapping class
# ---------------------------------------------------------------------------

def phi_matrix(m: MCGWord, G: SurfaceGroup, n: int) -> dict:
    """Matrix of the induced automorphism on the class-n Malcev algebra in the
    filtered basis; block-unipotent with identity diagonal blocks."""
    if not torelli_h1_check(m, G):
        raise TwistError(f"{m.describe()} is not Torelli on H1")
    fb = filtered_basis(G.genus, n)
    cols = []
    for idx in range(fb.dimension):
        img = G.dehn_shorten(evaluate(m, fb.words[idx]))
        s = log_truncated(normal_form(magnus_expand(img, n + 1, G.n_generators), G))
        col = fb.coordinates(s)
        for k, c in enumerate(col):
            d_src, d_tgt = fb.degrees[idx], fb.degrees[k]
            if d_tgt < d_src and c:
                raise InternalInvariantError("column drops filtration degree")
            if d_tgt == d_src and c != (1 if k == idx else 0):
                raise InternalInvariantError("diagonal block is not the identity")
        cols.append(col)
    return mat_from_columns(cols)


# ---------------------------------------------------------------------------
# Mapping torus algebras
# ---------------------------------------------------------------------------

@dataclass
class MappingTorusAlgebra:
    """Extension of the class-n Malcev algebra by log of the induced action
    (generator s dual to the section) and, when symplectized, a central t."""
    base: LieAlgebraData
    derivation: dict             # sparse matrix on base coordinates
    symplectized: bool
    labels: list[str] = field(init=False)
    degrees: list[int] = field(init=False)

    def __post_init__(self):
        self.labels = list(self.base.labels) + ["s"] + (["t"] if self.symplectized else [])
        self.degrees = list(self.base.degrees) + [1] + ([1] if self.symplectized else [])
        self._s = self.base.dimension
        self._check_derivation()

    @property
    def dimension(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return self.base.n

    def is_s(self, i: int) -> bool:
        return i == self._s

    def bracket(self, i: int, j: int) -> dict:
        base_dim = self.base.dimension
        if i == j or max(i, j) > self._s:
            return {}  # t is central
        if i < base_dim and j < base_dim:
            return self.base.bracket(i, j)
        if j == self._s:
            return {k: -c for k, c in self.bracket(j, i).items()}
        # [s, e_j] = D e_j
        return _matrix_column(self.derivation, j)

    def _check_derivation(self) -> None:
        base = self.base
        # unipotence: D maps each filtration degree into strictly higher degrees
        for i, row in self.derivation.items():
            for j, c in row.items():
                if c and base.degrees[i] <= base.degrees[j]:
                    raise InternalInvariantError(
                        "derivation does not raise the filtration degree")
        # exact Leibniz rule D[x,y] = [Dx,y] + [x,Dy] on every basis pair
        for i in range(base.dimension):
            for j in range(i + 1, base.dimension):
                lhs = mat_apply(self.derivation, base.bracket(i, j))
                rhs: dict[int, Fraction] = {}
                for k, c in _matrix_column(self.derivation, i).items():
                    vec_add_scaled(rhs, base.bracket(k, j), c)
                for k, c in _matrix_column(self.derivation, j).items():
                    vec_add_scaled(rhs, base.bracket(i, k), c)
                if lhs != rhs:
                    raise InternalInvariantError(
                        f"Leibniz fails on [{base.labels[i]},{base.labels[j]}]")

    def check_jacobi(self) -> None:
        """Jacobi on the extended algebra, all triples of total weight <= n."""
        dim = self.dimension
        for i in range(dim):
            for j in range(i + 1, dim):
                bij = self.bracket(i, j)
                for k in range(j, dim):
                    if self.degrees[i] + self.degrees[j] + self.degrees[k] > self.n:
                        continue
                    acc: dict[int, Fraction] = {}
                    vec_add_scaled(acc, self._bracket_vec(bij, k), 1)
                    vec_add_scaled(acc, self._bracket_vec(self.bracket(j, k), i), 1)
                    vec_add_scaled(acc, self._bracket_vec(self.bracket(i, k), j), -1)
                    if acc:
                        raise InternalInvariantError(
                            f"Jacobi fails on ({self.labels[i]},{self.labels[j]},{self.labels[k]})")

    def _bracket_vec(self, vec: dict, k: int) -> dict:
        """[vec, e_k]."""
        out: dict[int, Fraction] = {}
        for i, c in vec.items():
            vec_add_scaled(out, self.bracket(i, k), c)
        return out

    def dump_lines(self) -> list[str]:
        from .series import format_rational
        lines = [f"{idx} {label} degree {d}"
                 for idx, (label, d) in enumerate(zip(self.labels, self.degrees))]
        quads = []
        for i in range(self.dimension):
            for j in range(i + 1, self.dimension):
                for k, c in self.bracket(i, j).items():
                    quads.append((i, j, k, format_rational(c)))
        for q in sorted(quads):
            lines.append(f"[{q[0]},{q[1]},{q[2]},{q[3]}]")
        return lines


def _matrix_column(M: dict, j: int) -> dict:
    return {i: row[j] for i, row in M.items() if j in row}


def build_mapping_torus_algebra(L: LieAlgebraData, D: dict,
                                symplectize: bool = True) -> MappingTorusAlgebra:
    """Extend L by [s, x] = D(x) and, when symplectize, a central t.

    The Leibniz and Jacobi checks must pass exactly; a failure aborts, since
    the log of a Lie automorphism is always a derivation.
    """
    alg = MappingTorusAlgebra(L, D, symplectize)
    alg.check_jacobi()
    return alg


def mapping_torus_algebra(m: MCGWord, G: SurfaceGroup, n: int,
                          symplectize: bool = True) -> MappingTorusAlgebra:
    """The class-n Malcev algebra of X_phi (or M_phi when not symplectized)."""
    fb = filtered_basis(G.genus, n)
    M = phi_matrix(m, G, n)
    D = log_unipotent(M, fb.dimension)
    return build_mapping_torus_algebra(fb.algebra(), D, symplectize)


# ---------------------------------------------------------------------------
# Descriptive invariants
# ---------------------------------------------------------------------------

def algebra_invariants(A: MappingTorusAlgebra) -> dict:
    """Center dimension, lower-central-series dims, and the rank profile of
    ad(s), for comparing X_phi against X_Id at equal truncation. The top
    filtration degree of the base always sits inside the center of the
    truncated algebra (a truncation artifact)."""
    from .linalg import SparseEchelon
    dim = A.dimension
    # center: nullspace of x -> ([x, e_j])_j
    rows = []
    for i in range(dim):
        row: dict[tuple[int, int], Fraction] = {}
        for j in range(dim):
            for k, c in A.bracket(i, j).items():
                row[(j, k)] = c
        rows.append(row)
    ech = SparseEchelon()
    center_dim = 0
    for i in range(dim):
        if not ech.insert(rows[i]):
            center_dim += 1
    s_central = not any(A.bracket(A._s, j) for j in range(dim))
    # lower central series of the truncated algebra
    lcs_dims = [dim]
    current = [{i: Fraction(1)} for i in range(dim)]
    while True:
        nxt = SparseEchelon()
        for x in current:
            for j in range(dim):
                v = {}
                for i, c in x.items():
                    vec_add_scaled(v, A.bracket(i, j), c)
                if v:
                    nxt.insert(v)
        dims = nxt.rank
        if not dims:
            break
        lcs_dims.append(dims)
        current = list(nxt.pivots.values())
        if len(lcs_dims) > A.n + 2:
            raise InternalInvariantError("lower central series fails to terminate")
    # rank profile of ad(s) = D
    profile = []
    P = dict(A.derivation)
    while P:
        ech_p = SparseEchelon()
        for i, row in P.items():
            ech_p.insert(dict(row))
        profile.append(ech_p.rank)
        P = mat_mul(P, A.derivation)
    return {
        "dimension": dim,
        "center_dim": center_dim,
        "s_central": s_central,
        "lcs_dims": lcs_dims,
        "ad_s_rank_profile": profile,
    }
