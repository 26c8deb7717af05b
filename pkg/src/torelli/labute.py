"""Labute's graded Lie algebra of a surface group, realized inside the
truncated envelope.

The completed envelope of the Malcev algebra is the quotient of the free
associative series algebra on A_1,B_1,...,A_g,B_g by the closed two-sided
ideal generated by rho = magnus_expand(relator) - 1. Under deglex with
A_1 < B_1 < ... < A_g < B_g the leading monomial of rho is B_g A_g with
coefficient -1, so the quotient has the rewrite rule

    B_g A_g  ->  A_g B_g + sum_{i<g} (A_i B_i - B_i A_i) + tail(rho),

where tail(rho) is the degree >= 3 part of rho. The rule's left side has no
self-overlap, so rewriting is confluent, and every step replaces a monomial
by deglex-smaller monomials of the same degree plus strictly higher-degree
terms, so it terminates under truncation. Dropping the tail gives the
homogeneous rule of the associated graded (quadratic) algebra, which is
what the graded basis machinery uses.
"""

from __future__ import annotations

import functools
import math
import random
from fractions import Fraction

from .linalg import SparseEchelon
from .series import Monomial, TruncatedSeries, log_truncated, magnus_expand
from .words import GroupWord, SurfaceGroup

DEFAULT_CLASS_CAP = 7


class ClassLimitError(ValueError):
    """Requested truncation class exceeds the configured cap."""


class LieMembershipError(RuntimeError):
    """A vector that must lie in the Lie subspace does not; internal bug."""


# ---------------------------------------------------------------------------
# Rewriting
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _rewrite_rule(g: int, n: int, homogeneous: bool):
    """(forbidden pair, replacement term dict) for genus g at class n."""
    bg, ag = 2 * g - 1, 2 * g - 2
    repl: dict[Monomial, object] = {(ag, bg): 1}
    for i in range(1, g):
        ai, bi = 2 * i - 2, 2 * i - 1
        repl[(ai, bi)] = 1
        repl[(bi, ai)] = -1
    if not homogeneous:
        rho = magnus_expand(SurfaceGroup(g).relator, n, n_symbols=2 * g)
        for m, c in rho.terms.items():
            if len(m) >= 3:
                repl[m] = c
    return (bg, ag), repl


def _first_forbidden(mon: Monomial, bg: int, ag: int):
    for i in range(len(mon) - 1):
        if mon[i] == bg and mon[i + 1] == ag:
            return i
    return None


def _normalize_terms(terms: dict, g: int, n: int, homogeneous: bool, rng=None) -> dict:
    (bg, ag), repl = _rewrite_rule(g, n, homogeneous)
    out: dict[Monomial, object] = {}
    pending = dict(terms)
    while pending:
        items = list(pending.items())
        if rng is not None:
            rng.shuffle(items)
        nxt: dict[Monomial, object] = {}
        for mon, c in items:
            if not c:
                continue
            positions = [i for i in range(len(mon) - 1)
                         if mon[i] == bg and mon[i + 1] == ag]
            if not positions:
                v = out.get(mon, 0) + c
                if v:
                    out[mon] = v
                else:
                    del out[mon]
                continue
            pos = rng.choice(positions) if rng is not None else positions[0]
            head, tail = mon[:pos], mon[pos + 2:]
            room = n - len(head) - len(tail)
            for mr, cr in repl.items():
                if len(mr) < room:
                    key = head + mr + tail
                    v = nxt.get(key, 0) + c * cr
                    if v:
                        nxt[key] = v
                    else:
                        del nxt[key]
        pending = nxt
    return out


def normal_form(s: TruncatedSeries, G: SurfaceGroup, rng=None) -> TruncatedSeries:
    """Unique representative with no monomial containing the factor B_g A_g.

    Linear and idempotent; `rng` randomizes the reduction order (the result
    is order-independent by confluence, which the property suite checks).
    """
    return TruncatedSeries(s.n, _normalize_terms(s.terms, G.genus, s.n, False, rng))


def normal_form_graded(terms: dict, G: SurfaceGroup, degree: int) -> dict:
    """Homogeneous-rule normal form of a degree-homogeneous term dict."""
    return _normalize_terms(terms, G.genus, degree + 1, True)


# ---------------------------------------------------------------------------
# Dimension bookkeeping
# ---------------------------------------------------------------------------

def envelope_monomial_count(g: int, d: int) -> int:
    """Number of normalized monomials of degree d: c_0=1, c_1=2g,
    c_d = 2g c_{d-1} - c_{d-2} (Hilbert series 1/(1 - 2g t + t^2))."""
    if d < 0:
        return 0
    prev, cur = 1, 2 * g
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, 2 * g * cur - prev
    return cur


def witt_dimension(m: int, d: int) -> int:
    """Degree-d dimension of the free Lie algebra on m symbols."""
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _moebius(e) * m ** (d // e)
    assert total % d == 0
    return total // d


def _moebius(k: int) -> int:
    if k == 1:
        return 1
    result, p = 1, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            result = -result
        p += 1
    if k > 1:
        result = -result
    return result


def _poly_mul_trunc(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj and i + j <= n:
                    out[i + j] += ai * bj
    return out


@functools.lru_cache(maxsize=None)
def labute_graded_dims(g: int, n: int) -> tuple[int, ...]:
    """(d_1, ..., d_n) with prod (1-t^i)^(-d_i) = 1/(1 - 2g t + t^2) mod t^(n+1).

    PBW inversion: peel off one (1-t^i)^(d_i) factor per degree from the
    envelope Hilbert series.
    """
    rem = [envelope_monomial_count(g, d) for d in range(n + 1)]
    dims = []
    for i in range(1, n + 1):
        di = rem[i]
        dims.append(di)
        factor = [0] * (n + 1)
        for k in range(0, n // i + 1):
            factor[i * k] = (-1) ** k * math.comb(di, k)
        rem = _poly_mul_trunc(rem, factor, n)
        assert rem[0] == 1 and all(rem[j] == 0 for j in range(1, i + 1))
    return tuple(dims)


# ---------------------------------------------------------------------------
# Lyndon words and bracketings
# ---------------------------------------------------------------------------

def lyndon_words(m: int, d: int) -> list[Monomial]:
    """All Lyndon words of length d over 0..m-1, in lexicographic order (Duval)."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        if len(w) == d:
            out.append(tuple(w))
        ext = w[:]
        while len(ext) < d:
            ext.append(ext[len(ext) % len(w)])
        w = ext
        while w and w[-1] == m - 1:
            w.pop()
    return out


def standard_bracketing(word: Monomial):
    """Right standard factorization bracket tree of a Lyndon word."""
    if len(word) == 1:
        return word[0]
    # longest proper suffix that is Lyndon
    for i in range(1, len(word)):
        if _is_lyndon(word[i:]):
            return (standard_bracketing(word[:i]), standard_bracketing(word[i:]))
    raise AssertionError("not a Lyndon word")


def _is_lyndon(w: Monomial) -> bool:
    return all(w < w[i:] + w[:i] for i in range(1, len(w)))


def bracket_terms(tree) -> dict[Monomial, int]:
    """Envelope expansion of a bracket tree: [u, v] = uv - vu."""
    if isinstance(tree, int):
        return {(tree,): 1}
    left, right = map(bracket_terms, tree)
    out: dict[Monomial, int] = {}
    for ml, cl in left.items():
        for mr, cr in right.items():
            for key, c in ((ml + mr, cl * cr), (mr + ml, -cl * cr)):
                v = out.get(key, 0) + c
                if v:
                    out[key] = v
                else:
                    del out[key]
    return out


def bracket_label(tree) -> str:
    from .series import symbol_name
    if isinstance(tree, int):
        return symbol_name(tree)
    return f"[{bracket_label(tree[0])},{bracket_label(tree[1])}]"


def bracket_group_word(tree, G: SurfaceGroup) -> GroupWord:
    """Iterated group commutator realizing a bracket tree."""
    from .words import group_commutator
    if isinstance(tree, int):
        return G.generator_word(tree + 1)
    return group_commutator(bracket_group_word(tree[0], G),
                            bracket_group_word(tree[1], G))


def lyndon_basis(m: int, d: int) -> list[tuple[Monomial, object]]:
    """(word, bracket tree) descriptors for the free Lie algebra in degree d."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return [(w, standard_bracketing(w)) for w in lyndon_words(m, d)]


# ---------------------------------------------------------------------------
# Labute basis per degree
# ---------------------------------------------------------------------------

class DegreeBasis:
    """Echelonized image of the Lyndon bracketings in one graded degree."""

    def __init__(self, G: SurfaceGroup, degree: int):
        self.group = G
        self.degree = degree
        self.labels: list[str] = []
        self.trees: list[object] = []
        self.rows: list[dict] = []
        ech = SparseEchelon(track=True)
        for word, tree in lyndon_basis(G.n_generators, degree):
            row = normal_form_graded(bracket_terms(tree), G, degree)
            if row and ech.insert(row, tag=len(self.labels)):
                self.labels.append(bracket_label(tree))
                self.trees.append(tree)
                self.rows.append(row)
        self._echelon = ech
        expected = labute_graded_dims(G.genus, degree)[degree - 1]
        if len(self.labels) != expected:
            raise LieMembershipError(
                f"degree-{degree} basis rank {len(self.labels)} != PBW dimension {expected}")

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def solve(self, vec: dict):
        """Coordinates of a degree-homogeneous normalized vector, or None."""
        combo = self._echelon.solve(vec)
        if combo is None:
            return None
        return [combo.get(i, 0) for i in range(len(self.labels))]


@functools.lru_cache(maxsize=None)
def labute_basis(g: int, degree: int) -> DegreeBasis:
    return DegreeBasis(SurfaceGroup(g), degree)


# ---------------------------------------------------------------------------
# Identity tests and leading terms
# ---------------------------------------------------------------------------

def identity_mod_class(w: GroupWord, l: int, G: SurfaceGroup,
                       class_cap: int = DEFAULT_CLASS_CAP) -> bool:
    """True iff w maps to 1 in the class-l rational unipotent quotient."""
    if l < 2:
        raise ClassLimitError("class must be >= 2")
    if l > class_cap:
        raise ClassLimitError(f"class {l} exceeds cap {class_cap}")
    s = normal_form(magnus_expand(G.dehn_shorten(w), l, G.n_generators), G)
    return s.is_one()


class LeadingTerm:
    """Smallest-degree nonzero graded piece of a group element, or triviality."""

    __slots__ = ("degree", "coordinates", "max_class")

    def __init__(self, degree, coordinates, max_class):
        self.degree = degree
        self.coordinates = coordinates
        self.max_class = max_class

    @property
    def trivial(self) -> bool:
        return self.degree is None


def leading_term(w: GroupWord, G: SurfaceGroup, max_class: int) -> LeadingTerm:
    """Leading graded piece of w in Labute coordinates, exploring degrees
    1..max_class-1. The leading degree-N part of log equals the degree-N
    part of the normalized expansion minus 1, so no logarithm is needed; the
    component is verified to lie in the Lie subspace (degree-N Labute span).
    """
    if max_class < 2:
        raise ClassLimitError("max_class must be >= 2")
    s = normal_form(magnus_expand(G.dehn_shorten(w), max_class, G.n_generators), G)
    nmin = s.min_degree()
    if nmin is None:
        return LeadingTerm(None, None, max_class)
    component = s.degree_part(nmin)
    coords = labute_basis(G.genus, nmin).solve(component)
    if coords is None:
        raise LieMembershipError(
            f"degree-{nmin} leading component of a group element is not Lie")
    return LeadingTerm(nmin, coords, max_class)


def random_word(G: SurfaceGroup, length: int, rng: random.Random) -> GroupWord:
    letters = [rng.choice([-1, 1]) * rng.randint(1, G.n_generators)
               for _ in range(length)]
    return GroupWord.of(letters)


def random_series(G: SurfaceGroup, n: int, n_terms: int, rng: random.Random) -> TruncatedSeries:
    terms = {}
    for _ in range(n_terms):
        d = rng.randint(1, n - 1)
        mon = tuple(rng.randrange(G.n_generators) for _ in range(d))
        terms[mon] = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    return TruncatedSeries(n, terms)
