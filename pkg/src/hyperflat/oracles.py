"""Brute-force models used to cross-check the fast paths.

Nothing here calls the rewriting or carry-scan code: ideals are built as
explicit GF(2) spans over *all* monomials of a given degree, Catalan
numbers come from walking lattice paths, and squared-tuple classes come
from comparing products in the full linear-algebra model.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

from .f2_quotient_ring import F2Matrix, in_span, reduce_matrix


def all_monomials(nv: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of all degree-``d`` monomials in ``nv`` variables."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nv), d):
        e = [0] * nv
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort()
    return out


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _generators(n: int, oriented: bool) -> list[list[tuple[int, ...]]]:
    nv = n - 1
    gens = []
    for i in range(nv):
        sq = [0] * nv
        sq[i] = 2
        if i < nv - 1:
            mixed = [0] * nv
            mixed[i] = mixed[i + 1] = 1
            gens.append([tuple(sq), tuple(mixed)])
        else:
            gens.append([tuple(sq)])
    if oriented:
        lin = []
        for i in range(nv):
            e = [0] * nv
            e[i] = 1
            lin.append(tuple(e))
        gens.append(lin)
    return gens


class IdealModel:
    """Degree-``d`` piece of I(n) (or of (I(n), L)) as an explicit span."""

    def __init__(self, n: int, d: int, oriented: bool = False):
        self.n, self.d, self.oriented = n, d, oriented
        nv = n - 1
        self.monomials = all_monomials(nv, d)
        self.index = {m: j for j, m in enumerate(self.monomials)}
        rows = []
        for gen in _generators(n, oriented):
            gdeg = sum(gen[0])
            if gdeg > d:
                continue
            for mult in all_monomials(nv, d - gdeg):
                row = 0
                for term in gen:
                    row ^= 1 << self.index[_add(term, mult)]
                rows.append(row)
        self.echelon, self.rank = reduce_matrix(F2Matrix(len(self.monomials), tuple(rows)))

    def vector(self, terms) -> int:
        v = 0
        for t in terms:
            v ^= 1 << self.index[tuple(t)]
        return v

    def contains(self, terms) -> bool:
        return in_span(self.vector(terms), self.echelon)

    def quotient_dimension(self) -> int:
        return len(self.monomials) - self.rank

    def square_free_rank(self) -> int:
        """Rank of the span of the ideal together with all square-free monomials."""
        nv = self.n - 1
        extra = []
        for c in itertools.combinations(range(nv), self.d):
            e = [0] * nv
            for i in c:
                e[i] = 1
            extra.append(1 << self.index[tuple(e)])
        _, r = reduce_matrix(F2Matrix(len(self.monomials), self.echelon.rows + tuple(extra)))
        return r

    def is_square_free_basis(self) -> bool:
        sf = comb(self.n - 1, self.d)
        return self.square_free_rank() == self.rank + sf == len(self.monomials)


@lru_cache(maxsize=None)
def ideal_model(n: int, d: int, oriented: bool = False) -> IdealModel:
    return IdealModel(n, d, oriented)


def mask_to_exponents(mask: int, nv: int, power: int = 1) -> tuple[int, ...]:
    return tuple(power * (mask >> i & 1) for i in range(nv))


def vanishes_in_hat_quotient(masks, n: int, d: int) -> bool:
    """Full-model test of membership in the degree-d piece of (I(n), L)."""
    model = ideal_model(n, d, oriented=True)
    return model.contains(mask_to_exponents(m, n - 1) for m in masks)


def dyck_paths(m: int) -> int:
    """Count lattice paths (0,0)->(m,m) with unit steps never above y = x."""
    count = 0

    def walk(x: int, y: int) -> None:
        nonlocal count
        if x == m and y == m:
            count += 1
            return
        if x < m:
            walk(x + 1, y)
        if y < x:
            walk(x, y + 1)

    walk(0, 0)
    return count


def squared_tuple_class(I: tuple[int, ...], n: int) -> set[tuple[int, ...]]:
    """All J of the same length with x_J^2 = x_I^2, decided in the full model."""
    nv = n - 1
    k = len(I)
    model = ideal_model(n, 2 * k)

    def sq(J):
        e = [0] * nv
        for j in J:
            e[j - 1] = 2
        return tuple(e)

    target = sq(I)
    out = set()
    for J in itertools.combinations(range(1, n), k):
        e = sq(J)
        if e == target or model.contains([e, target]):
            out.add(J)
    return out
