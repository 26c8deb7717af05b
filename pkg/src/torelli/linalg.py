"""Sparse exact linear algebra over the rationals.

Vectors are dicts keyed by arbitrary comparable keys (monomial tuples,
index pairs, ...). The echelon keeps monic pivot rows keyed by their
minimal key, optionally tracking each row as a combination of the inserted
tags, which is what the basis-coordinate and Massey preimage solves need.
All pivot choices are deterministic (minimal key), so results are
byte-stable.
"""

from __future__ import annotations

from fractions import Fraction


def vec_add_scaled(target: dict, src: dict, c) -> None:
    if not c:
        return
    for k, v in src.items():
        w = target.get(k, 0) + c * v
        if w:
            target[k] = w
        else:
            del target[k]


class SparseEchelon:
    """Row echelon with monic pivots and optional combination tracking."""

    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict[object, dict] = {}
        self.combos: dict[object, dict] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: dict):
        """Fully reduce vec modulo the rows; returns (residual, combo).

        The residual is canonical (no pivot key survives), so reduction is
        linear and residuals of equal classes are identical.
        """
        v = dict(vec)
        combo: dict = {}
        while True:
            hits = [k for k in v if k in self.pivots]
            if not hits:
                return v, combo
            key = min(hits)
            c = v[key]
            vec_add_scaled(v, self.pivots[key], -c)
            if self.track:
                vec_add_scaled(combo, self.combos[key], c)

    def insert(self, vec: dict, tag=None) -> bool:
        """Insert a row; returns True if it was independent."""
        v, combo = self.reduce(vec)
        if not v:
            return False
        key = min(v)
        lead = Fraction(v[key]) if not isinstance(v[key], Fraction) else v[key]
        inv = 1 / lead
        row = {k: inv * c for k, c in v.items()}
        self.pivots[key] = row
        if self.track:
            tracked = {tag: inv}
            vec_add_scaled(tracked, combo, -inv)
            self.combos[key] = tracked
        return True

    def solve(self, vec: dict):
        """Express vec as a combination of inserted tags; None if outside the span."""
        if not self.track:
            raise RuntimeError("echelon built without tracking")
        residual, combo = self.reduce(vec)
        if residual:
            return None
        return combo

    def contains(self, vec: dict) -> bool:
        residual, _ = self.reduce(vec)
        return not residual


def nullspace_dimension(rows: list[dict], n_unknowns: int) -> int:
    """Dimension of the solution space of rows . x = 0 (columns 0..n_unknowns-1)."""
    ech = SparseEchelon()
    for r in rows:
        ech.insert(r)
    return n_unknowns - ech.rank
