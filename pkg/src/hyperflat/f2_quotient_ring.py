"""Exact arithmetic in F2[x_1..x_{n-1}] modulo the Lee--Szczarba ideal.

The ideal I(n) is generated by x_i^2 + x_i x_{i+1} (1 <= i < n-1) and
x_{n-1}^2.  Square-free monomials form a basis of the quotient, so every
element is stored as a set of square-free monomials encoded as bitmasks:
bit ``i`` of a mask stands for the variable x_{i+1}.

Because each generator is a binomial (or a monomial), rewriting a single
monomial always yields a single monomial or zero.  The canonical strategy
rewrites the smallest squared variable first, which amounts to a carry
scan from x_1 towards x_{n-1}.

Linear algebra over GF(2) uses Python integers as packed bit rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Optional, Sequence

__all__ = [
    "SquareFreePoly",
    "F2Matrix",
    "monomial_normal_form",
    "rewrite_monomial",
    "normal_form",
    "multiply",
    "square",
    "reduce_matrix",
    "in_span",
    "vanishes_mod_L",
    "square_free_monomials",
    "linear_form",
]


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")


def _carry_scan(counts: Sequence[int], nv: int) -> Optional[int]:
    # counts[i] is the exponent of x_{i+1}; returns the normal-form mask or None for 0
    out = 0
    carry = 0
    for i in range(nv):
        t = counts[i] + carry
        if t == 0:
            carry = 0
            continue
        if t >= 2 and i == nv - 1:
            return None
        out |= 1 << i
        carry = t - 1
    return out


def monomial_normal_form(exponents: Sequence[int], n: int) -> Optional[int]:
    """Normal form of the monomial with the given exponent vector.

    Returns the square-free bitmask it reduces to, or ``None`` when the
    monomial lies in I(n).
    """
    _check_n(n)
    nv = n - 1
    if len(exponents) != nv:
        raise ValueError(f"exponent vector has length {len(exponents)}, expected {nv}")
    if any(e < 0 for e in exponents):
        raise ValueError("exponents must be non-negative")
    return _carry_scan(exponents, nv)


def rewrite_monomial(
    exponents: Sequence[int],
    n: int,
    choose: Optional[Callable[[list[int]], int]] = None,
) -> Optional[int]:
    """Reduce a monomial by literal rewriting with the ideal generators.

    ``choose`` picks the rewrite site among the indices with exponent >= 2
    (0-based); the default takes the smallest one.  The potential
    sum_i e_i * (n - i) must drop by one per step, which is asserted.
    """
    _check_n(n)
    nv = n - 1
    if len(exponents) != nv:
        raise ValueError(f"exponent vector has length {len(exponents)}, expected {nv}")
    e = list(exponents)
    potential = sum(ei * (n - (i + 1)) for i, ei in enumerate(e))
    while True:
        sites = [i for i, ei in enumerate(e) if ei >= 2]
        if not sites:
            return sum(1 << i for i, ei in enumerate(e) if ei)
        i = sites[0] if choose is None else choose(sites)
        if i not in sites:
            raise ValueError(f"strategy chose non-rewritable site {i}")
        if i == nv - 1:
            return None
        e[i] -= 1
        e[i + 1] += 1
        new_potential = sum(ei * (n - (j + 1)) for j, ei in enumerate(e))
        assert new_potential == potential - 1
        potential = new_potential


def _mask_key(m: int) -> tuple[int, int]:
    return (m.bit_count(), m)


@dataclass(frozen=True)
class SquareFreePoly:
    """Element of F2[x_1..x_{n-1}]/I(n) on the square-free monomial basis."""

    n: int
    support: frozenset[int]

    def __post_init__(self):
        _check_n(self.n)
        limit = 1 << (self.n - 1)
        for m in self.support:
            if m < 0 or m >= limit:
                raise ValueError(f"monomial mask {m} out of range for n={self.n}")

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "SquareFreePoly":
        # coefficients are mod 2: repeated masks cancel
        acc: set[int] = set()
        for m in masks:
            acc ^= {m}
        return cls(n, frozenset(acc))

    @classmethod
    def zero(cls, n: int) -> "SquareFreePoly":
        return cls(n, frozenset())

    @classmethod
    def one(cls, n: int) -> "SquareFreePoly":
        return cls(n, frozenset({0}))

    @classmethod
    def variable(cls, i: int, n: int) -> "SquareFreePoly":
        """The class of x_i (1-based)."""
        if not 1 <= i <= n - 1:
            raise ValueError(f"variable index {i} out of range for n={n}")
        return cls(n, frozenset({1 << (i - 1)}))

    def monomials(self) -> tuple[int, ...]:
        """Support in canonical order: graded, then by bitmask."""
        return tuple(sorted(self.support, key=_mask_key))

    def degrees(self) -> set[int]:
        return {m.bit_count() for m in self.support}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> Optional[int]:
        """Degree of a homogeneous element, ``None`` for zero."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError("element is not homogeneous")
        return ds.pop()

    def homogeneous_part(self, d: int) -> "SquareFreePoly":
        return SquareFreePoly(self.n, frozenset(m for m in self.support if m.bit_count() == d))

    def __bool__(self) -> bool:
        return bool(self.support)

    def __len__(self) -> int:
        return len(self.support)

    def __add__(self, other: "SquareFreePoly") -> "SquareFreePoly":
        if self.n != other.n:
            raise ValueError(f"mismatched n: {self.n} vs {other.n}")
        return SquareFreePoly(self.n, self.support ^ other.support)

    __sub__ = __add__

    def __mul__(self, other: "SquareFreePoly") -> "SquareFreePoly":
        return multiply(self, other)

    def __str__(self) -> str:
        if not self.support:
            return "0"
        terms = []
        for m in self.monomials():
            if m == 0:
                terms.append("1")
            else:
                terms.append("".join(f"x{i + 1}" for i in range(self.n - 1) if m >> i & 1))
        return " + ".join(terms)


def normal_form(terms: Iterable[Sequence[int]], n: int) -> SquareFreePoly:
    """Reduce a polynomial, given as a multiset of exponent vectors, mod I(n)."""
    acc: set[int] = set()
    for exps in terms:
        m = monomial_normal_form(exps, n)
        if m is not None:
            acc ^= {m}
    return SquareFreePoly(n, frozenset(acc))


def _mask_product(a: int, b: int, nv: int) -> Optional[int]:
    if not a & b:
        return a | b
    counts = [(a >> i & 1) + (b >> i & 1) for i in range(nv)]
    return _carry_scan(counts, nv)


def _mask_square(m: int, nv: int) -> Optional[int]:
    if m == 0:
        return 0
    return _carry_scan([2 * (m >> i & 1) for i in range(nv)], nv)


def multiply(a: SquareFreePoly, b: SquareFreePoly) -> SquareFreePoly:
    if a.n != b.n:
        raise ValueError(f"mismatched n: {a.n} vs {b.n}")
    nv = a.n - 1
    acc: set[int] = set()
    for ma in a.support:
        for mb in b.support:
            m = _mask_product(ma, mb, nv)
            if m is not None:
                acc ^= {m}
    return SquareFreePoly(a.n, frozenset(acc))


def square(a: SquareFreePoly) -> SquareFreePoly:
    """Square via Frobenius: cross terms cancel in characteristic 2."""
    nv = a.n - 1
    acc: set[int] = set()
    for m in a.support:
        s = _mask_square(m, nv)
        if s is not None:
            acc ^= {s}
    return SquareFreePoly(a.n, frozenset(acc))


def square_free_monomials(nv: int, d: int) -> list[int]:
    """All square-free masks of degree ``d`` in ``nv`` variables, ascending."""
    if d < 0 or d > nv:
        return []
    return sorted(sum(1 << i for i in c) for c in itertools.combinations(range(nv), d))


def linear_form(n: int) -> SquareFreePoly:
    """L = x_1 + ... + x_{n-1}."""
    return SquareFreePoly(n, frozenset(1 << i for i in range(n - 1)))


# ---------------------------------------------------------------------------
# GF(2) linear algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class F2Matrix:
    """Rows packed into Python ints; bit ``j`` of a row is column ``j``."""

    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row wider than ncols")

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]]) -> "F2Matrix":
        ncols = len(dense[0]) if dense else 0
        rows = []
        for row in dense:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            rows.append(sum(1 << j for j, v in enumerate(row) if v & 1))
        return cls(ncols, tuple(rows))

    def to_dense(self) -> list[list[int]]:
        return [[r >> j & 1 for j in range(self.ncols)] for r in self.rows]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @cached_property
    def _pivots(self) -> dict[int, int]:
        piv = {}
        for r in self.rows:
            if r:
                p = (r & -r).bit_length() - 1
                if p in piv:
                    raise ValueError("matrix is not in echelon form (repeated pivot)")
                piv[p] = r
        return piv


def _reduce_against(v: int, piv: dict[int, int]) -> int:
    while v:
        p = (v & -v).bit_length() - 1
        r = piv.get(p)
        if r is None:
            return v
        v ^= r
    return 0


def reduce_matrix(M: F2Matrix) -> tuple[F2Matrix, int]:
    """Row-echelon form and rank.

    Pivots are the lowest set column of each row; output rows are sorted by
    pivot column and the pivot columns are distinct.
    """
    piv: dict[int, int] = {}
    for r in M.rows:
        r = _reduce_against(r, piv)
        if r:
            piv[(r & -r).bit_length() - 1] = r
    rows = tuple(piv[p] for p in sorted(piv))
    return F2Matrix(M.ncols, rows), len(rows)


def in_span(v: int, E: F2Matrix) -> bool:
    """Whether the packed vector ``v`` lies in the row space of echelon ``E``."""
    if v < 0 or v >= 1 << E.ncols:
        raise ValueError(f"vector wider than {E.ncols} columns")
    return _reduce_against(v, E._pivots) == 0


# ---------------------------------------------------------------------------
# Quotient by the linear form L
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _l_multiples(n: int, d: int) -> tuple[dict[int, int], F2Matrix]:
    # columns: degree-d square-free monomials, largest mask first, so the
    # lowest-column pivot rule eliminates monomials with high variables first
    nv = n - 1
    cols = square_free_monomials(nv, d)[::-1]
    index = {m: j for j, m in enumerate(cols)}
    rows = []
    for m in square_free_monomials(nv, d - 1):
        row = 0
        for i in range(nv):
            t = _mask_product(m, 1 << i, nv)
            if t is not None:
                row ^= 1 << index[t]
        rows.append(row)
    E, _ = reduce_matrix(F2Matrix(len(cols), tuple(rows)))
    return index, E


def l_multiples_rank(n: int, d: int) -> int:
    """Rank of the degree-d piece of the ideal generated by L in the quotient."""
    if d <= 0 or d > n - 1:
        return 0
    return _l_multiples(n, d)[1].nrows


def vanishes_mod_L(a: SquareFreePoly) -> bool:
    """Whether a homogeneous ``a`` vanishes in F2[x]/(I(n), x_1+...+x_{n-1})."""
    if not a.is_homogeneous():
        raise ValueError("vanishes_mod_L needs a homogeneous element")
    d = a.degree()
    if d is None:
        return True
    if d == 0:
        return False
    index, E = _l_multiples(a.n, d)
    v = 0
    for m in a.support:
        v ^= 1 << index[m]
    return in_span(v, E)
