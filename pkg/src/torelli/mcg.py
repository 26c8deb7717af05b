"""Separating Dehn twists, mapping class words, and Torelli depth.

A separating twist along a curve whose class is a product of distinct
handle commutators acts by the homotopy Picard-Lefschetz rule: generators
of handles on the basepoint side are fixed, generators of handles on the
far side are conjugated by the boundary word. The based representative of
the declared boundary class is chosen by trying all cyclic rotations of the
commutator factors and both conjugation directions until the image of the
relator is trivial.
"""

from __future__ import annotations

from dataclasses import dataclass

from .labute import LeadingTerm, labute_basis, leading_term
from .words import GroupWord, SurfaceGroup, WordError, group_commutator


class TwistError(ValueError):
    """Inconsistent curve data: no rotation/direction validates."""


class InternalInvariantError(RuntimeError):
    """A certified invariant failed; indicates a bug, never user error."""


@dataclass(frozen=True)
class TwistAutomorphism:
    name: str
    group: SurfaceGroup
    boundary: GroupWord          # chosen based representative w_C
    sign: int                    # +1 twist, -1 inverse twist
    conjugated: frozenset[int]   # handle indices whose generators are conjugated
    images: tuple[GroupWord, ...]  # image of generator k at index k-1

    def image(self, letter: int) -> GroupWord:
        w = self.images[abs(letter) - 1]
        return w if letter > 0 else w.inverse()

    def apply(self, w: GroupWord) -> GroupWord:
        out: list[int] = []
        for x in w.letters:
            for y in self.image(x).letters:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return GroupWord(tuple(out))

    def inverse_twist(self) -> "TwistAutomorphism":
        return _twist_with_conjugator(self.group, self.name, self.boundary,
                                      -self.sign, self.conjugated)


def _twist_with_conjugator(G, name, w, sign, conjugated) -> TwistAutomorphism:
    u = w if sign > 0 else w.inverse()
    images = []
    for k in range(1, G.n_generators + 1):
        handle = (k + 1) // 2
        gen = G.generator_word(k)
        images.append(u * gen * u.inverse() if handle in conjugated else gen)
    return TwistAutomorphism(name, G, w, sign, frozenset(conjugated), tuple(images))


def _commutator_factors(G: SurfaceGroup, w: GroupWord) -> list[int]:
    """Handle indices of a word that is literally a product of handle commutators."""
    letters = w.letters
    if len(letters) % 4:
        raise TwistError("boundary word is not a product of handle commutators")
    handles = []
    for j in range(0, len(letters), 4):
        block = letters[j:j + 4]
        i = (abs(block[0]) + 1) // 2
        if block != G.handle_commutator(i).letters:
            raise TwistError("boundary word is not a product of handle commutators")
        handles.append(i)
    if len(set(handles)) != len(handles):
        raise TwistError("boundary word repeats a handle commutator")
    return handles


def make_separating_twist(G: SurfaceGroup, name: str, boundary_word: GroupWord,
                          conjugated, sign: int = 1) -> TwistAutomorphism:
    """Build and validate a separating twist from its declared boundary class."""
    conjugated = frozenset(conjugated)
    if 1 in conjugated:
        raise TwistError("handle 1 carries the basepoint and cannot be conjugated")
    for h in conjugated:
        if not 2 <= h <= G.genus:
            raise TwistError(f"conjugated handle {h} out of range")
    if sign not in (1, -1):
        raise TwistError("sign must be +1 or -1")
    handles = _commutator_factors(G, boundary_word)
    for r in range(len(handles)):
        rotated = handles[r:] + handles[:r]
        w = GroupWord()
        for i in rotated:
            w = w * G.handle_commutator(i)
        for u in (w, w.inverse()):
            t = _twist_with_conjugator(G, name, u, sign, conjugated)
            if validate_twist(t, G):
                _check_torelli_images(t, G)
                return t
    raise TwistError(f"no rotation/direction of {G.format_word(boundary_word)} "
                     "validates against the relator")


def validate_twist(t, G: SurfaceGroup) -> bool:
    """True iff the generator images extend to an endomorphism of the group,
    i.e. the image of the relator is trivial."""
    return G.dehn_is_trivial(t.apply(G.relator))


def _check_torelli_images(t: TwistAutomorphism, G: SurfaceGroup) -> None:
    for k in range(1, G.n_generators + 1):
        expected = tuple(1 if j == k - 1 else 0 for j in range(G.n_generators))
        if G.abelianization(t.images[k - 1]) != expected:
            raise InternalInvariantError(f"twist {t.name} is not Torelli on H1")


# ---------------------------------------------------------------------------
# Mapping class words (expression trees over named twists)
# ---------------------------------------------------------------------------

class MCGWord:
    """Base class; leaves are twists, nodes compose/invert/bracket."""

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(MCGWord):
    def describe(self):
        return "Id"


@dataclass(frozen=True)
class TwistLeaf(MCGWord):
    twist: TwistAutomorphism

    def describe(self):
        return self.twist.name if self.twist.sign > 0 else f"{self.twist.name}^-1"


@dataclass(frozen=True)
class Compose(MCGWord):
    left: MCGWord   # applied second
    right: MCGWord  # applied first

    def describe(self):
        return f"{self.left.describe()} {self.right.describe()}"


@dataclass(frozen=True)
class Inverse(MCGWord):
    inner: MCGWord

    def describe(self):
        return f"({self.inner.describe()})^-1"


@dataclass(frozen=True)
class Bracket(MCGWord):
    left: MCGWord
    right: MCGWord

    def describe(self):
        return f"[{self.left.describe()},{self.right.describe()}]"


def invert_word(m: MCGWord) -> MCGWord:
    """Reverse the tree; twist leaves invert by sign flip."""
    if isinstance(m, Identity):
        return m
    if isinstance(m, TwistLeaf):
        return TwistLeaf(m.twist.inverse_twist())
    if isinstance(m, Inverse):
        return m.inner
    if isinstance(m, Compose):
        return Compose(invert_word(m.right), invert_word(m.left))
    if isinstance(m, Bracket):
        return Bracket(m.right, m.left)
    raise TypeError(m)


def evaluate(m: MCGWord, w: GroupWord) -> GroupWord:
    """Apply a mapping class word to a group word, innermost factor first."""
    if isinstance(m, Identity):
        return w
    if isinstance(m, TwistLeaf):
        return m.twist.apply(w)
    if isinstance(m, Compose):
        return evaluate(m.left, evaluate(m.right, w))
    if isinstance(m, Inverse):
        return evaluate(invert_word(m.inner), w)
    if isinstance(m, Bracket):
        f, g = m.left, m.right
        out = evaluate(invert_word(g), w)
        out = evaluate(invert_word(f), out)
        out = evaluate(g, out)
        return evaluate(f, out)
    raise TypeError(m)


def torelli_h1_check(m: MCGWord, G: SurfaceGroup) -> bool:
    """True iff the induced map on H1 (exponent sums) is the identity."""
    for k in range(1, G.n_generators + 1):
        img = evaluate(m, G.generator_word(k))
        expected = tuple(1 if j == k - 1 else 0 for j in range(G.n_generators))
        if G.abelianization(img) != expected:
            return False
    return True


# ---------------------------------------------------------------------------
# Expression grammar: identifiers, juxtaposition (apply right first),
# postfix ^-1, [f,g] = f g f^-1 g^-1, parentheses.
# ---------------------------------------------------------------------------

class MCGParseError(ValueError):
    pass


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "[],()":
            tokens.append(ch)
            i += 1
        elif text.startswith("^-1", i):
            tokens.append("^-1")
            i += 3
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise MCGParseError(f"unexpected character {ch!r} in expression")
    return tokens


def parse_mcg_word(text: str, twists: dict[str, TwistAutomorphism]) -> MCGWord:
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def expect(tok):
        nonlocal pos
        if peek() != tok:
            raise MCGParseError(f"expected {tok!r}, found {peek()!r}")
        pos += 1

    def atom():
        nonlocal pos
        tok = peek()
        if tok == "(":
            expect("(")
            e = expr()
            expect(")")
        elif tok == "[":
            expect("[")
            left = expr()
            expect(",")
            right = expr()
            expect("]")
            e = Bracket(left, right)
        elif tok is None or tok in "),]":
            raise MCGParseError("expected a twist name, '[' or '('")
        else:
            pos += 1
            if tok == "Id":
                e = Identity()
            elif tok in twists:
                e = TwistLeaf(twists[tok])
            else:
                raise MCGParseError(f"unknown twist name {tok!r}")
        while peek() == "^-1":
            expect("^-1")
            e = Inverse(e)
        return e

    def expr():
        factors = [atom()]
        while peek() is not None and peek() not in "),]" and peek() != ",":
            factors.append(atom())
        e = factors[-1]
        for f in reversed(factors[:-1]):
            e = Compose(f, e)
        return e

    e = expr()
    if pos != len(tokens):
        raise MCGParseError(f"trailing tokens at {tokens[pos:]}")
    return e


# ---------------------------------------------------------------------------
# Depth reports
# ---------------------------------------------------------------------------

@dataclass
class GeneratorLeading:
    generator: str
    degree: int | None
    coordinates: list | None
    basis_labels: list[str] | None


@dataclass
class DepthReport:
    word: str
    max_class: int
    depth: int              # the depth value, or max_class when not exact
    exact: bool             # False means "depth >= max_class"
    per_generator: list[GeneratorLeading]
    torelli: bool
    lemma_bound: int | None

    @property
    def depth_text(self) -> str:
        return str(self.depth) if self.exact else f">= {self.depth}"


def depth_report(m: MCGWord, G: SurfaceGroup, max_class: int,
                 _assert_lemma: bool = True) -> DepthReport:
    """Per-generator leading terms of phi(c) c^-1 and the resulting depth.

    depth = min over generators of the leading degree (trivial generators
    contribute infinity); when the word is syntactically a bracket, the
    guaranteed Lemma bound depth >= depth(f) + depth(g) - 1 is asserted.
    """
    if max_class < 3:
        raise ValueError("max_class must be >= 3")
    if not torelli_h1_check(m, G):
        raise TwistError(f"{m.describe()} is not Torelli on H1")
    per_gen = []
    depths = []
    for k in range(1, G.n_generators + 1):
        gen = G.generator_word(k)
        wc = evaluate(m, gen) * gen.inverse()
        lt = leading_term(wc, G, max_class)
        if lt.trivial:
            per_gen.append(GeneratorLeading(G.gen_name(k), None, None, None))
        else:
            labels = labute_basis(G.genus, lt.degree).labels
            per_gen.append(GeneratorLeading(G.gen_name(k), lt.degree,
                                            lt.coordinates, labels))
            depths.append(lt.degree)
    if depths:
        depth, exact = min(depths), True
    else:
        depth, exact = max_class, False
    bound = None
    if isinstance(m, Bracket):
        lr = depth_report(m.left, G, max_class, _assert_lemma=_assert_lemma)
        rr = depth_report(m.right, G, max_class, _assert_lemma=_assert_lemma)
        bound = lr.depth + rr.depth - 1
        if _assert_lemma and exact and depth < bound:
            raise InternalInvariantError(
                f"bracket depth {depth} violates the lemma bound {bound}")
    report = DepthReport(m.describe(), max_class, depth, exact, per_gen,
                         torelli=True, lemma_bound=bound)
    if report.torelli and report.exact and report.depth < 2:
        raise InternalInvariantError("Torelli word with depth < 2")
    return report


# ---------------------------------------------------------------------------
# Built-in scenarios
# ---------------------------------------------------------------------------

def builtin_separating_twist(G: SurfaceGroup, name: str = "tC") -> TwistAutomorphism:
    """The standard separating twist along the (a1,b1) curve: handle 1 stays,
    every other handle is conjugated."""
    return make_separating_twist(G, name, G.handle_commutator(1),
                                 conjugated=range(2, G.genus + 1), sign=1)


def builtin_s4_scenario():
    """Genus-4 surface with the two curves whose twists generate the bracket
    experiments: C1 = (a1,b1)(a2,b2) conjugating handles {3,4} and
    C2 = (a1,b1)(a4,b4) conjugating handles {2,3}."""
    G = SurfaceGroup(4)
    c1 = G.handle_commutator(1) * G.handle_commutator(2)
    c2 = G.handle_commutator(1) * G.handle_commutator(4)
    t1 = make_separating_twist(G, "t1", c1, conjugated={3, 4}, sign=1)
    t2 = make_separating_twist(G, "t2", c2, conjugated={2, 3}, sign=1)
    return G, t1, t2
