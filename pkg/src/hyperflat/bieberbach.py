"""Crystallographic groups of diagonal type and their cubulated quotients.

Elements are Euclidean isometries x -> eps * x + t with eps in {+1,-1}^n and
exact dyadic translations.  After conjugating by x -> 4x every translation
is even, the folding map of the standard cubulation becomes invariant, and
the quotient R^n / G is built as a finite cube complex by enumerating
orbits of cells inside a fundamental box [0, L)^n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

from .cube_complex import CubeComplex

__all__ = [
    "AffineIsometry",
    "DiagonalBieberbachGroup",
    "TorsionError",
    "QuotientGeometry",
    "lee_szczarba_group",
    "lattice_group",
    "normalize_even",
    "orientable_double_cover",
    "quotient_cube_complex",
    "torus_complex",
    "hat_torus_complex",
    "lattice_hnf",
    "lattice_exponent",
    "group_index",
    "cell_automorphism",
]


class TorsionError(ValueError):
    """Raised when a group element stabilizes a cell of the cubulation."""

    def __init__(self, message, element=None, cell=None):
        super().__init__(message)
        self.element = element
        self.cell = cell


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class AffineIsometry:
    """x -> signs * x + translation, componentwise."""

    signs: tuple[int, ...]
    translation: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.signs) != len(self.translation):
            raise ValueError("signs and translation must have the same length")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "translation", tuple(_frac(t) for t in self.translation))
        for t in self.translation:
            d = t.denominator
            if d & (d - 1):
                raise ValueError(f"translation entry {t} is not dyadic")

    @classmethod
    def identity(cls, n: int) -> "AffineIsometry":
        return cls((1,) * n, (Fraction(0),) * n)

    @classmethod
    def translation_by(cls, vector: Sequence) -> "AffineIsometry":
        return cls((1,) * len(vector), tuple(vector))

    @property
    def dim(self) -> int:
        return len(self.signs)

    def __mul__(self, other: "AffineIsometry") -> "AffineIsometry":
        # (self * other)(x) = self(other(x))
        return AffineIsometry(
            tuple(a * b for a, b in zip(self.signs, other.signs)),
            tuple(s * u + t for s, u, t in zip(self.signs, other.translation, self.translation)),
        )

    def inverse(self) -> "AffineIsometry":
        return AffineIsometry(self.signs, tuple(-s * t for s, t in zip(self.signs, self.translation)))

    def __pow__(self, k: int) -> "AffineIsometry":
        base = self if k >= 0 else self.inverse()
        out = AffineIsometry.identity(self.dim)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __call__(self, x: Sequence) -> tuple[Fraction, ...]:
        return tuple(s * _frac(xi) + t for s, xi, t in zip(self.signs, x, self.translation))

    @property
    def det(self) -> int:
        out = 1
        for s in self.signs:
            out *= s
        return out

    def is_translation(self) -> bool:
        return all(s == 1 for s in self.signs)

    def is_identity(self) -> bool:
        return self.is_translation() and not any(self.translation)

    def conjugate_by_homothety(self, c) -> "AffineIsometry":
        """A g A^{-1} for A(x) = c x."""
        c = _frac(c)
        return AffineIsometry(self.signs, tuple(c * t for t in self.translation))

    def integral(self) -> bool:
        return all(t.denominator == 1 for t in self.translation)


# ---------------------------------------------------------------------------
# integer lattices
# ---------------------------------------------------------------------------


def lattice_hnf(vectors: Iterable[Sequence[int]], n: int) -> list[list[int]]:
    """Upper-triangular integer basis of the span of ``vectors``.

    Rows are returned with positive pivots on the diagonal when the span
    has full rank; otherwise a ``ValueError`` is raised.
    """
    rows = [list(map(int, v)) for v in vectors if any(v)]
    basis = []
    for col in range(n):
        while True:
            nz = [r for r in rows if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for j in range(n):
                    r[j] -= q * p[j]
            rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            raise ValueError("translation lattice does not have full rank")
        p = nz[0]
        rows = [r for r in rows if r is not p]
        if p[col] < 0:
            p = [-x for x in p]
        basis.append(p)
    # remaining rows are zero in every column by construction
    for i in range(n):
        for k in range(i):
            q = basis[k][i] // basis[i][i]
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[i])]
    return basis


def _lattice_contains(basis: list[list[int]], x: Sequence[int]) -> bool:
    x = list(x)
    for i, row in enumerate(basis):
        if x[i] % row[i]:
            return False
        q = x[i] // row[i]
        if q:
            x = [a - q * b for a, b in zip(x, row)]
    return not any(x)


def _det(basis: list[list[int]]) -> int:
    return reduce(lambda a, b: a * b, (basis[i][i] for i in range(len(basis))), 1)


def lattice_exponent(basis: list[list[int]]) -> int:
    """Smallest L > 0 with L * Z^n contained in the lattice."""
    n = len(basis)
    det = _det(basis)
    out = 1
    for i in range(n):
        e = [0] * n
        for m in range(1, det + 1):
            if det % m:
                continue
            e[i] = m
            if _lattice_contains(basis, e):
                out = lcm(out, m)
                break
    return out


def _gf2_rank_mod2(basis: list[list[int]]) -> int:
    rows = [sum(1 << j for j, a in enumerate(r) if a % 2) for r in basis]
    piv: dict[int, int] = {}
    for r in rows:
        while r:
            p = r.bit_length() - 1
            if p not in piv:
                piv[p] = r
                break
            r ^= piv[p]
    return len(piv)


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------


Element = tuple[tuple[int, ...], tuple[int, ...]]


def _compose_mod(g: Element, h: Element, L: int) -> Element:
    (e, t), (d, s) = g, h
    return (
        tuple(a * b for a, b in zip(e, d)),
        tuple((a * u + v) % L for a, u, v in zip(e, s, t)),
    )


def _sign_mask(signs: Sequence[int]) -> int:
    return sum(1 << i for i, s in enumerate(signs) if s < 0)


@dataclass(frozen=True)
class DiagonalBieberbachGroup:
    """A group of diagonal-type isometries given by generators."""

    n: int
    generators: tuple[AffineIsometry, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.dim != self.n:
                raise ValueError(f"generator of dimension {g.dim} in a group of dimension {self.n}")

    @property
    def orientation_character(self) -> tuple[int, ...]:
        return tuple(g.det for g in self.generators)

    @property
    def is_orientable(self) -> bool:
        return all(d == 1 for d in self.orientation_character)

    @property
    def is_even(self) -> bool:
        return all(t.denominator == 1 and t.numerator % 2 == 0 for g in self.generators for t in g.translation)

    @property
    def is_integral(self) -> bool:
        return all(g.integral() for g in self.generators)

    @cached_property
    def holonomy_rank(self) -> int:
        """Rank of the holonomy image, an elementary abelian 2-group."""
        return _gf2_rank_mod2([[1 if s < 0 else 0 for s in g.signs] for g in self.generators])

    @property
    def holonomy_order(self) -> int:
        return 1 << self.holonomy_rank

    def holonomy_image(self) -> list[tuple[int, ...]]:
        """All sign vectors of the holonomy image (2^rank of them)."""
        seen = {(1,) * self.n}
        frontier = list(seen)
        gens = {g.signs for g in self.generators}
        while frontier:
            nxt = []
            for e in frontier:
                for s in gens:
                    p = tuple(a * b for a, b in zip(e, s))
                    if p not in seen:
                        seen.add(p)
                        nxt.append(p)
            frontier = nxt
        return sorted(seen)

    def _denominator(self) -> int:
        return reduce(lcm, (t.denominator for g in self.generators for t in g.translation), 1)

    def _seed_lattice(self) -> list[list[int]]:
        # squares, commutators and pure translations of generators, closed
        # under the sign action of the holonomy
        if not self.is_integral:
            raise ValueError("seed lattice needs integral translations")
        vecs = []
        for g in self.generators:
            vecs.append((g * g).translation)
            if g.is_translation():
                vecs.append(g.translation)
        for g, h in itertools.combinations(self.generators, 2):
            c = g * h * g.inverse() * h.inverse()
            vecs.append(c.translation)
        basis = lattice_hnf(vecs, self.n)
        while True:
            more = [tuple(s * x for s, x in zip(g.signs, row)) for g in self.generators for row in basis]
            new = lattice_hnf(basis + [list(v) for v in more], self.n)
            if new == basis:
                return basis
            basis = new

    @cached_property
    def _lattice_data(self) -> tuple[list[list[int]], int, list[Element]]:
        if not self.is_integral:
            raise ValueError("group has non-integral translations; normalize it first")
        seed = self._seed_lattice()
        L0 = lattice_exponent(seed)
        elements0 = self.elements_mod(L0)
        trans = [list(t) for e, t in elements0 if all(s == 1 for s in e)]
        basis = lattice_hnf(trans + [[L0 if i == j else 0 for j in range(self.n)] for i in range(self.n)], self.n)
        L = lattice_exponent(basis)
        if self.is_even:
            L = lcm(L, 4)
        return basis, L, self.elements_mod(L)

    def translation_lattice(self) -> list[list[Fraction]]:
        """Basis of the translation subgroup (upper triangular)."""
        if self.is_integral:
            return [[Fraction(a) for a in row] for row in self._lattice_data[0]]
        c = self._denominator()
        scaled = DiagonalBieberbachGroup(self.n, tuple(g.conjugate_by_homothety(c) for g in self.generators))
        return [[Fraction(a, c) for a in row] for row in scaled._lattice_data[0]]

    @property
    def box_size(self) -> int:
        """Side L of the fundamental box; L*Z^n lies in the group."""
        return self._lattice_data[1]

    def elements_mod(self, L: int) -> list[Element]:
        """The finite group G / (L Z)^n, elements as (signs, translation mod L)."""
        if not self.is_integral:
            raise ValueError("group has non-integral translations")
        gens = [(g.signs, tuple(int(t) % L for t in g.translation)) for g in self.generators]
        ident = ((1,) * self.n, (0,) * self.n)
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = _compose_mod(x, s, L)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def quotient_order(self) -> int:
        """|G / (L Z)^n| for the group's own box size L."""
        return len(self._lattice_data[2])

    def contains(self, g: AffineIsometry) -> bool:
        if not g.integral():
            return False
        L = self.box_size
        key = (g.signs, tuple(int(t) % L for t in g.translation))
        return key in self._element_set

    @cached_property
    def _element_set(self) -> frozenset:
        return frozenset(self._lattice_data[2])


def lee_szczarba_group(n: int) -> DiagonalBieberbachGroup:
    """Generators g_0 (shift x_1 by 1) and g_i (negate x_i, shift x_{i+1} by 1/2)."""
    if n < 2:
        raise ValueError("Lee-Szczarba groups need n >= 2")
    gens = [AffineIsometry.translation_by([1] + [0] * (n - 1))]
    for i in range(1, n):
        signs = [1] * n
        signs[i - 1] = -1
        t = [Fraction(0)] * n
        t[i] = Fraction(1, 2)
        gens.append(AffineIsometry(tuple(signs), tuple(t)))
    return DiagonalBieberbachGroup(n, tuple(gens), name=f"LS_{n}")


def lattice_group(n: int, scale: int = 1) -> DiagonalBieberbachGroup:
    """The pure translation group (scale * Z)^n."""
    gens = []
    for i in range(n):
        v = [0] * n
        v[i] = scale
        gens.append(AffineIsometry.translation_by(v))
    return DiagonalBieberbachGroup(n, tuple(gens), name=f"({scale}Z)^{n}")


def normalize_even(G: DiagonalBieberbachGroup) -> DiagonalBieberbachGroup:
    """Conjugate by x -> 4x so that every translation becomes even."""
    for g in G.generators:
        for t in g.translation:
            if (2 * t).denominator != 1:
                raise ValueError(f"translation entry {t} is not in (1/2)Z")
    gens = tuple(g.conjugate_by_homothety(4) for g in G.generators)
    return DiagonalBieberbachGroup(G.n, gens, name=G.name)


def orientable_double_cover(G: DiagonalBieberbachGroup) -> tuple[DiagonalBieberbachGroup, bool]:
    """Kernel of the orientation character.

    Returns ``(H, True)`` for the index-2 subgroup, or ``(G, False)`` when
    ``G`` is already orientation preserving.  Generators come from
    Reidemeister--Schreier with transversal {1, r}, r the first
    orientation-reversing generator.
    """
    reversing = [g for g in G.generators if g.det == -1]
    if not reversing:
        return G, False
    r = reversing[0]
    r_inv = r.inverse()
    gens = []
    for s in G.generators:
        if s.det == 1:
            cands = [s, r * s * r_inv]
        else:
            cands = [s * r_inv, r * s]
        for c in cands:
            if not c.is_identity() and c not in gens:
                gens.append(c)
    name = f"{G.name}^or" if G.name else ""
    return DiagonalBieberbachGroup(G.n, tuple(gens), name=name), True


def group_index(G: DiagonalBieberbachGroup, H: DiagonalBieberbachGroup) -> int:
    """[G : H] for H a finite-index subgroup of G (both integral)."""
    for h in H.generators:
        if not G.contains(h):
            raise ValueError("H is not a subgroup of G")
    L = lcm(G.box_size, H.box_size)
    order_g = len(G.elements_mod(L))
    order_h = len(H.elements_mod(L))
    if order_g % order_h:
        raise ValueError("index is not an integer")
    return order_g // order_h


# ---------------------------------------------------------------------------
# cubulation
# ---------------------------------------------------------------------------

Cell = tuple[tuple[int, ...], int]  # (base vertex mod L, direction mask)


def _cell_image(g: Element, cell: Cell, L: int) -> Cell:
    (eps, t), (v, S) = g, cell
    return (
        tuple(
            (e * x + s - (1 if (e < 0 and S >> a & 1) else 0)) % L
            for a, (e, x, s) in enumerate(zip(eps, v, t))
        ),
        S,
    )


@dataclass
class QuotientGeometry:
    """Coordinates behind a quotient complex R^n / G."""

    group: DiagonalBieberbachGroup
    L: int
    elements: list
    reps: list[list[Cell]]
    # (v, S) in the box -> (cell id, signs of an element taking it to its representative)
    lookup: dict = field(repr=False)

    def locate(self, cell: Cell) -> tuple[int, tuple[int, ...]]:
        v, S = cell
        return self.lookup[(tuple(x % self.L for x in v), S)]


def _directions(S: int, n: int) -> list[int]:
    return [a for a in range(n) if S >> a & 1]


def quotient_cube_complex(G: DiagonalBieberbachGroup, require_even: bool = True) -> CubeComplex:
    """The cube complex R_n / G, with its parity folding when G is even."""
    if not G.is_integral:
        raise ValueError("translations must be integral; apply normalize_even first")
    if require_even and not G.is_even:
        raise ValueError("group is not normalized: translations must lie in (2Z)^n")
    n = G.n
    L = G.box_size
    elements = G._lattice_data[2]
    order = len(elements)
    reps: list[list[Cell]] = [[] for _ in range(n + 1)]
    lookup: dict = {}
    box = list(itertools.product(range(L), repeat=n))
    masks = sorted(range(1 << n), key=lambda m: (m.bit_count(), m))
    for S in masks:
        k = S.bit_count()
        for v in box:
            cell = (v, S)
            if cell in lookup:
                continue
            cid = len(reps[k])
            reps[k].append(cell)
            for g in elements:
                img = _cell_image(g, cell, L)
                if img in lookup:
                    raise TorsionError(
                        f"element {g} maps a cell onto an already visited cell; action is not free",
                        element=g,
                        cell=cell,
                    )
                lookup[img] = (cid, g[0])
            # all images distinct, so the orbit has exactly `order` cells
    geometry = QuotientGeometry(G, L, elements, reps, lookup)

    facets: list[list[list]] = [[[] for _ in reps[0]]]
    for k in range(1, n + 1):
        layer = []
        for v, S in reps[k]:
            dirs = _directions(S, n)
            slots = []
            for a_local, c in enumerate(dirs):
                rest = [d for d in dirs if d != c]
                for side in (0, 1):
                    w = list(v)
                    w[c] = (w[c] + side) % L
                    fid, eps = lookup[(tuple(w), S & ~(1 << c))]
                    label = tuple(2 * dirs.index(d) + (1 if eps[d] < 0 else 0) for d in rest)
                    slots.append((fid, label))
            layer.append(slots)
        facets.append(layer)

    folding = None
    if G.is_even:
        folding = tuple(sum(1 << a for a in range(n) if v[a] % 2) for v, _ in reps[0])
    C = CubeComplex(
        dim=n,
        counts=[len(r) for r in reps],
        facets=facets,
        folding=folding,
        flags={"orientable": G.is_orientable},
        geometry=geometry,
    )
    assert sum(C.counts) * order == len(lookup)
    return C


def torus_complex(n: int) -> CubeComplex:
    """R_n / Z^n: one vertex, one top cube, opposite faces glued."""
    return quotient_cube_complex(lattice_group(n, 1), require_even=False)


def hat_torus_complex(n: int) -> CubeComplex:
    """R_n / (2Z)^n, with 2^n vertices."""
    return quotient_cube_complex(lattice_group(n, 2))


def cell_automorphism(C: CubeComplex, g: AffineIsometry) -> list[tuple[int, tuple[int, ...]]]:
    """Action of an isometry normalizing the deck group on the top cells of C.

    Returns, for each top cell, its image cell and the local flip pattern
    (1 where a local coordinate is reversed).
    """
    geo = C.geometry
    if geo is None:
        raise ValueError("complex has no coordinates")
    if not g.integral():
        raise ValueError("isometry is not cellular (non-integral translation)")
    G = geo.group
    g_inv = g.inverse()
    for h in G.generators:
        if not G.contains(g * h * g_inv):
            raise ValueError("isometry does not normalize the deck group")
    L = geo.L
    elem = (g.signs, tuple(int(t) % L for t in g.translation))
    out = []
    for cell in geo.reps[C.dim]:
        img = _cell_image(elem, cell, L)
        cid, eps = geo.lookup[img]
        flips = tuple(1 if g.signs[a] * eps[a] < 0 else 0 for a in range(C.dim))
        out.append((cid, flips))
    return out
