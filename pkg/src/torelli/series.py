"""Truncated noncommutative power series over exact rationals.

Monomials are tuples of symbol indices 0..m-1 (symbol 2i-2 is A_i, symbol
2i-1 is B_i, so the deglex order with A_1 < B_1 < ... < A_g < B_g is plain
tuple comparison within a degree). A series of truncation class n stores
only terms of total degree < n. Coefficients are exact: Python ints where
possible, Fractions where division occurs; the two mix transparently.

Expansion of long group words works internally with integer-encoded
monomials (base-m digit strings) and a balanced product tree, which is the
performance kernel of the whole artifact.
"""

from __future__ import annotations

from fractions import Fraction

Monomial = tuple[int, ...]


class SeriesError(ValueError):
    pass


def _deglex_key(mon: Monomial):
    return (len(mon), mon)


class TruncatedSeries:
    """Sparse truncated series; immutable by convention (never mutate terms)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        if n < 1:
            raise SeriesError("truncation class must be >= 1")
        self.n = n
        self.terms: dict[Monomial, object] = {}
        if terms:
            for m, c in terms.items():
                if c and len(m) < n:
                    self.terms[m] = c

    @staticmethod
    def one(n: int) -> "TruncatedSeries":
        return TruncatedSeries(n, {(): 1})

    @staticmethod
    def zero(n: int) -> "TruncatedSeries":
        return TruncatedSeries(n)

    def constant_term(self):
        return self.terms.get((), 0)

    def is_one(self) -> bool:
        return self.terms == {(): 1}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries)
                and self.n == other.n and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return TruncatedSeries(self.n, out)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "TruncatedSeries":
        if not c:
            return TruncatedSeries(self.n)
        return TruncatedSeries(self.n, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        n = self.n
        by_deg: list[list] = [[] for _ in range(n)]
        for m, c in other.terms.items():
            by_deg[len(m)].append((m, c))
        out: dict[Monomial, object] = {}
        for ma, ca in self.terms.items():
            da = len(ma)
            for db in range(n - da):
                for mb, cb in by_deg[db]:
                    key = ma + mb
                    v = out.get(key, 0) + ca * cb
                    if v:
                        out[key] = v
                    else:
                        del out[key]
        return TruncatedSeries(n, out)

    def _check(self, other):
        if self.n != other.n:
            raise SeriesError("truncation classes differ")

    def truncate(self, n: int) -> "TruncatedSeries":
        if n > self.n:
            raise SeriesError("cannot extend a truncated series")
        return TruncatedSeries(n, {m: c for m, c in self.terms.items() if len(m) < n})

    def degree_part(self, d: int) -> dict:
        return {m: c for m, c in self.terms.items() if len(m) == d}

    def min_degree(self) -> int | None:
        """Smallest degree with a nonzero term, ignoring the constant; None if none."""
        degs = [len(m) for m in self.terms if m]
        return min(degs) if degs else None

    def dump_lines(self) -> list[str]:
        """Canonical dump: one `<rational> <monomial>` line per term, deglex order."""
        lines = []
        for m in sorted(self.terms, key=_deglex_key):
            mon = "*".join(symbol_name(s) for s in m) if m else "1"
            lines.append(f"{format_rational(self.terms[m])} {mon}")
        return lines


def symbol_name(s: int) -> str:
    return f"A{s // 2 + 1}" if s % 2 == 0 else f"B{s // 2 + 1}"


def format_rational(c) -> str:
    f = Fraction(c)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# Magnus expansion kernel (integer-encoded monomials, balanced product tree)
# ---------------------------------------------------------------------------

_FOLD_CUTOFF = 16


def _enc_letter(letter: int, n: int, m: int, pows):
    """Encoded per-degree dicts for the expansion of a single letter.

    a |-> 1 + A; a^-1 |-> 1 - A + A^2 - ... (truncated geometric series).
    """
    sym = abs(letter) - 1
    out = [dict() for _ in range(n)]
    out[0][0] = 1
    if letter > 0:
        if n > 1:
            out[1][sym] = 1
    else:
        code = 0
        for d in range(1, n):
            code += sym * pows[d - 1]
            out[d][code] = 1 if d % 2 == 0 else -1
    return out


def _enc_mul(A, B, n, pows):
    out = [dict() for _ in range(n)]
    for da in range(n):
        Ad = A[da]
        if not Ad:
            continue
        shift = pows[da]
        for db in range(n - da):
            Bd = B[db]
            if not Bd:
                continue
            O = out[da + db]
            for cb, vb in Bd.items():
                base = cb * shift
                for ca, va in Ad.items():
                    k = ca + base
                    v = O.get(k, 0) + va * vb
                    if v:
                        O[k] = v
                    else:
                        del O[k]
    return out


def _expand_range(letters, lo, hi, n, m, pows):
    if hi - lo <= _FOLD_CUTOFF:
        acc = _enc_letter(letters[lo], n, m, pows)
        for i in range(lo + 1, hi):
            acc = _enc_mul(acc, _enc_letter(letters[i], n, m, pows), n, pows)
        return acc
    mid = (lo + hi) // 2
    return _enc_mul(_expand_range(letters, lo, mid, n, m, pows),
                    _expand_range(letters, mid, hi, n, m, pows), n, pows)


def _decode(code: int, d: int, m: int) -> Monomial:
    mon = []
    for _ in range(d):
        code, r = divmod(code, m)
        mon.append(r)
    return tuple(mon)


def magnus_expand(w, n: int, n_symbols: int | None = None) -> TruncatedSeries:
    """Multiplicative Magnus image of a word under a_i -> 1 + A_i.

    `w` is a GroupWord or a sequence of signed letters. `n_symbols` fixes the
    alphabet size (2g); by default the largest generator index used.
    """
    letters = tuple(getattr(w, "letters", w))
    if n < 1:
        raise SeriesError("truncation class must be >= 1")
    if not letters:
        return TruncatedSeries.one(n)
    m = n_symbols or max(abs(x) for x in letters)
    if any(abs(x) > m for x in letters):
        raise SeriesError("letter outside declared alphabet")
    pows = [m ** d for d in range(n)]
    enc = _expand_range(letters, 0, len(letters), n, m, pows)
    terms: dict[Monomial, object] = {}
    for d, bucket in enumerate(enc):
        for code, v in bucket.items():
            terms[_decode(code, d, m)] = v
    return TruncatedSeries(n, terms)


# ---------------------------------------------------------------------------
# Truncated logarithm / exponential
# ---------------------------------------------------------------------------

def log_truncated(s: TruncatedSeries) -> TruncatedSeries:
    """log of a series with constant term 1: sum (-1)^(k+1) (s-1)^k / k."""
    if s.constant_term() != 1:
        raise SeriesError("log requires constant term 1")
    n = s.n
    u = TruncatedSeries(n, {m: c for m, c in s.terms.items() if m})
    acc = u
    p = u
    for k in range(2, n):
        p = p * u
        if p.is_zero():
            break
        acc = acc + p.scale(Fraction((-1) ** (k + 1), k))
    return acc


def exp_truncated(s: TruncatedSeries) -> TruncatedSeries:
    """exp of a series with constant term 0: sum s^k / k!."""
    if s.constant_term() != 0:
        raise SeriesError("exp requires constant term 0")
    n = s.n
    acc = TruncatedSeries.one(n) + s
    p = s
    fact = 1
    for k in range(2, n):
        p = p * s
        if p.is_zero():
            break
        fact *= k
        acc = acc + p.scale(Fraction(1, fact))
    return acc
