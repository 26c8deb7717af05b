"""Surface group words: free reduction, commutators, and the word problem.

A letter is a signed integer +-k for the generator with index k in 1..2g;
odd indices are the a_i, even indices the b_i, so a_i = 2i-1, b_i = 2i.
Words are immutable and always stored freely reduced.

The one-relator presentation of a closed genus-g surface group satisfies the
C'(1/6) small cancellation condition for g >= 2 (pieces of the symmetrized
relator set are single letters), so Dehn's algorithm decides the word
problem: cyclically reduce, replace any subword that is more than half of a
cyclic permutation of the relator or its inverse by the shorter complement,
repeat until stuck.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass


class WordError(ValueError):
    """Invalid letter data (out-of-range generator index)."""


def free_reduce(letters) -> tuple[int, ...]:
    """Freely reduce a letter sequence; idempotent."""
    stack = []
    for x in letters:
        if x == 0:
            raise WordError("letter 0 is not a generator")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@dataclass(frozen=True)
class GroupWord:
    """A freely reduced word in the generators of a (surface) group."""

    letters: tuple[int, ...] = ()

    @staticmethod
    def of(letters) -> "GroupWord":
        return GroupWord(free_reduce(letters))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(free_reduce(self.letters + other.letters))

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple(-x for x in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def max_generator(self) -> int:
        return max((abs(x) for x in self.letters), default=0)


IDENTITY_WORD = GroupWord()


def invert(w: GroupWord) -> GroupWord:
    return w.inverse()


def group_commutator(x: GroupWord, y: GroupWord) -> GroupWord:
    """(x, y) = x y x^-1 y^-1, freely reduced."""
    return GroupWord(free_reduce(
        x.letters + y.letters + x.inverse().letters + y.inverse().letters))


def _rotations(t: tuple[int, ...]):
    return [t[i:] + t[:i] for i in range(len(t))]


@dataclass(frozen=True)
class SurfaceGroup:
    """Genus-g closed surface group with the standard one-relator presentation."""

    genus: int

    def __post_init__(self):
        if self.genus < 2:
            raise WordError("genus must be >= 2")

    @property
    def n_generators(self) -> int:
        return 2 * self.genus

    def a(self, i: int) -> int:
        """Generator index of a_i."""
        if not 1 <= i <= self.genus:
            raise WordError(f"handle index {i} out of range")
        return 2 * i - 1

    def b(self, i: int) -> int:
        if not 1 <= i <= self.genus:
            raise WordError(f"handle index {i} out of range")
        return 2 * i

    def generator_word(self, k: int) -> GroupWord:
        self.check_letters((k,))
        return GroupWord((k,))

    def gen_name(self, k: int) -> str:
        """Name of the letter +-k, e.g. 'a1' or 'b2^-1'."""
        idx = abs(k)
        base = f"a{(idx + 1) // 2}" if idx % 2 == 1 else f"b{idx // 2}"
        return base if k > 0 else base + "^-1"

    def check_letters(self, letters) -> None:
        for x in letters:
            if not 1 <= abs(x) <= self.n_generators:
                raise WordError(f"letter {x} outside generators of genus {self.genus}")

    def handle_commutator(self, i: int) -> GroupWord:
        """(a_i, b_i)."""
        return group_commutator(self.generator_word(self.a(i)),
                                self.generator_word(self.b(i)))

    @functools.cached_property
    def relator(self) -> GroupWord:
        w = IDENTITY_WORD
        for i in range(1, self.genus + 1):
            w = w * self.handle_commutator(i)
        return w

    @functools.cached_property
    def intersection_form(self) -> tuple[tuple[int, ...], ...]:
        """Standard symplectic pairing: a_i . b_i = +1, block diagonal."""
        n = self.n_generators
        m = [[0] * n for _ in range(n)]
        for i in range(self.genus):
            m[2 * i][2 * i + 1] = 1
            m[2 * i + 1][2 * i] = -1
        return tuple(tuple(r) for r in m)

    def abelianization(self, w: GroupWord) -> tuple[int, ...]:
        """Exponent-sum vector of w in H_1."""
        v = [0] * self.n_generators
        for x in w.letters:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(v)

    def parse_word(self, text: str) -> GroupWord:
        """Parse the word literal syntax: whitespace-separated `a1 b1^-1 ...` tokens."""
        letters = []
        for tok in text.split():
            name, sign = tok, 1
            if "^" in tok:
                name, exp = tok.split("^", 1)
                if exp == "-1":
                    sign = -1
                elif exp not in ("1", "+1"):
                    raise WordError(f"unsupported exponent in token {tok!r}")
            if len(name) < 2 or name[0] not in "ab" or not name[1:].isdigit():
                raise WordError(f"bad generator token {tok!r}")
            i = int(name[1:])
            if not 1 <= i <= self.genus:
                raise WordError(f"handle index {i} out of range in {tok!r}")
            k = self.a(i) if name[0] == "a" else self.b(i)
            letters.append(sign * k)
        return GroupWord.of(letters)

    def format_word(self, w: GroupWord) -> str:
        return " ".join(self.gen_name(x) for x in w.letters) if w else "1"

    @functools.cached_property
    def _dehn_table(self):
        """Symmetrized relators (all rotations of r and r^-1), bucketed by first letter."""
        rel = self.relator.letters
        table: dict[int, list[tuple[int, ...]]] = {}
        for base in (rel, self.relator.inverse().letters):
            for rot in _rotations(base):
                table.setdefault(rot[0], []).append(rot)
        return table

    def _longest_match_at(self, word, i, limit):
        """Longest common prefix of word[i:] with any symmetrized relator."""
        best_len, best_rel = 0, None
        for rel in self._dehn_table.get(word[i], ()):
            m = 0
            cap = min(limit, len(rel), len(word) - i)
            while m < cap and word[i + m] == rel[m]:
                m += 1
            if m > best_len:
                best_len, best_rel = m, rel
        return best_len, best_rel

    def dehn_shorten(self, w: GroupWord) -> GroupWord:
        """Return a shorter word for the same group element.

        Applies >half-relator replacements left to right on the linear word
        (no cyclic rotations, so the element itself is preserved, not just
        its conjugacy class). Used to keep Magnus expansions cheap.
        """
        self.check_letters(w.letters)
        half = 2 * self.genus
        word = list(w.letters)
        changed = True
        while changed:
            changed = False
            i = 0
            while i < len(word):
                m, rel = self._longest_match_at(word, i, limit=len(word) - i)
                if m > half:
                    complement = tuple(-x for x in reversed(rel[m:]))
                    word = list(free_reduce(tuple(word[:i]) + complement + tuple(word[i + m:])))
                    changed = True
                    i = max(0, i - len(rel))
                else:
                    i += 1
        return GroupWord(tuple(word))

    def dehn_is_trivial(self, w: GroupWord) -> bool:
        """Exact word problem: True iff w represents the identity."""
        self.check_letters(w.letters)
        half = 2 * self.genus
        full = 4 * self.genus
        word = list(free_reduce(w.letters))
        while True:
            # cyclic reduction (changes the element only by conjugation)
            while len(word) >= 2 and word[0] == -word[-1]:
                word = list(free_reduce(word[1:-1]))
            if not word:
                return True
            # greedy longest match over all cyclic positions
            doubled = word + word
            best = (0, None, 0)  # (match length, relator, position)
            for i in range(len(word)):
                m, rel = self._longest_match_at(doubled, i, limit=min(full, len(word)))
                if m > best[0]:
                    best = (m, rel, i)
            m, rel, i = best
            if m <= half:
                return False
            # rotate so the match is linear, then replace s by t^-1 (rel = s t)
            word = word[i:] + word[:i]
            complement = tuple(-x for x in reversed(rel[m:]))
            word = list(free_reduce(complement + tuple(word[m:])))


def dehn_is_trivial(w: GroupWord, G: SurfaceGroup) -> bool:
    return G.dehn_is_trivial(w)
