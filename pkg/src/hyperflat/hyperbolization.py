"""Strict hyperbolization at the level of pieces and gluings.

A foldable n-dimensional complex C and a piece X whose faces match the
n-cube give H_X(C): one copy of X per top cube of C, glued along facets.
Piece sigma is parametrized through the local frame of its top cube, so a
gluing label is the cube symmetry h_tau^{-1} h_sigma taking sigma-local
coordinates to tau-local ones, with h the charts of the folding.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cube_complex import CubeComplex, CubeSymmetry, folding, to_json

__all__ = [
    "PieceModel",
    "Gluing",
    "HyperbolizedComplex",
    "MultiComponentFaceError",
    "PieceAction",
    "hyperbolize",
    "lift_deck_action",
    "quotient_pieces",
    "translation_action",
    "DegreeChain",
    "chain_degrees",
    "common_cover_lattice",
    "covering_degree_chain",
    "injrad_bound",
    "to_json_h",
]


class MultiComponentFaceError(ValueError):
    """A face of the piece has several components; gluing would be ambiguous."""


Face = tuple[int, int]  # (mask of fixed coordinates, their values)


def cube_faces(n: int) -> list[Face]:
    out = []
    for fixed in range(1 << n):
        sub = fixed
        vals = []
        while True:
            vals.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & fixed
        out.extend((fixed, v) for v in sorted(vals))
    return out


@dataclass
class PieceModel:
    """Combinatorial stand-in for a hyperbolizing piece: the face poset of the n-cube."""

    dim: int
    connectivity: dict[Face, int] = field(default_factory=dict)
    stably_parallelizable: Optional[bool] = None
    source: str = "X"

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be non-negative")
        faces = set(cube_faces(self.dim))
        full = (1 << self.dim) - 1
        for face, count in self.connectivity.items():
            if face not in faces:
                raise ValueError(f"{face} is not a face of the {self.dim}-cube")
            if count < 1:
                raise ValueError("connectivity counts must be at least 1")
            if face[0] == full and count != 1:
                raise ValueError("vertices of the piece are single points")

    def faces(self) -> list[Face]:
        return cube_faces(self.dim)

    def face_dim(self, face: Face) -> int:
        return self.dim - face[0].bit_count()

    def components(self, face: Face) -> int:
        return self.connectivity.get(face, 1)

    def below(self, a: Face, b: Face) -> bool:
        """a is a face of b."""
        return a[0] & b[0] == b[0] and a[1] & b[0] == b[1]

    @property
    def tag(self) -> str:
        return f"{self.source}:{self.dim}"


def _sym_slot(sym: CubeSymmetry, slot: int) -> int:
    a, side = slot >> 1, slot & 1
    return 2 * sym.perm[a] + (side ^ sym.flips[a])


@dataclass(frozen=True)
class Gluing:
    piece_a: int
    slot_a: int
    piece_b: int
    slot_b: int
    label: CubeSymmetry  # piece_a local -> piece_b local

    def reversed(self) -> "Gluing":
        return Gluing(self.piece_b, self.slot_b, self.piece_a, self.slot_a, self.label.inverse())


@dataclass
class HyperbolizedComplex:
    dim: int
    charts: list[CubeSymmetry]
    gluings: list[Gluing]
    boundary: list[tuple[int, int]] = field(default_factory=list)
    piece: Optional[PieceModel] = None
    source: Optional[CubeComplex] = field(default=None, repr=False)

    @property
    def piece_count(self) -> int:
        return len(self.charts)

    def gluing_table(self) -> dict[tuple[int, int], list[Gluing]]:
        """Both directions of every gluing, keyed by (piece, slot)."""
        table: dict[tuple[int, int], list[Gluing]] = {}
        for g in self.gluings:
            table.setdefault((g.piece_a, g.slot_a), []).append(g)
            table.setdefault((g.piece_b, g.slot_b), []).append(g.reversed())
        return table

    def check(self) -> list[str]:
        bad = []
        seen = set()
        for g in self.gluings:
            if _sym_slot(g.label, g.slot_a) != g.slot_b:
                bad.append(f"gluing {g} does not carry slot {g.slot_a} to slot {g.slot_b}")
            back = g.reversed()
            if not (back.label * g.label).is_identity():
                bad.append(f"gluing {g} is not inverted by its reverse")
            key = frozenset([(g.piece_a, g.slot_a), (g.piece_b, g.slot_b)])
            if key in seen:
                bad.append(f"facet pair {sorted(key)} glued twice")
            seen.add(key)
        glued = {k for g in self.gluings for k in ((g.piece_a, g.slot_a), (g.piece_b, g.slot_b))}
        for p in range(self.piece_count):
            for s in range(2 * self.dim):
                if (p, s) not in glued and (p, s) not in self.boundary:
                    bad.append(f"piece {p} facet {s} is neither glued nor boundary")
        return bad

    def labels(self) -> list[CubeSymmetry]:
        return [g.label for g in self.gluings]


def _maximal_low_cells(C: CubeComplex) -> list[tuple[int, int]]:
    covered = [set() for _ in range(C.dim + 1)]
    covered[C.dim] = set(range(C.counts[C.dim]))
    for k in range(C.dim, 0, -1):
        for c in covered[k]:
            for f, _ in C.facets[k][c]:
                covered[k - 1].add(f)
    return [(k, c) for k in range(C.dim) for c in range(C.counts[k]) if c not in covered[k]]


def _facet_incidence(C: CubeComplex) -> dict[int, list[tuple[int, int]]]:
    inc: dict[int, list[tuple[int, int]]] = {}
    n = C.dim
    for c in range(C.counts[n]):
        for s, (f, _) in enumerate(C.facets[n][c]):
            inc.setdefault(f, []).append((c, s))
    return inc


def _facet_transfer(C: CubeComplex, c: int, s: int, d: int, t: int) -> CubeSymmetry:
    """The complex's own identification of cube c's slot s with cube d's slot t.

    Returned as the B_n element that sends c-local coordinates to d-local
    coordinates, taking facet s onto facet t.
    """
    n = C.dim
    _, la = C.facets[n][c][s]
    _, lb = C.facets[n][d][t]
    a, sa = s >> 1, s & 1
    b, sb = t >> 1, t & 1
    perm = [0] * n
    flips = [0] * n
    perm[a] = b
    flips[a] = sa ^ sb
    # facet-local u sits at c-coordinate la[u] and at d-coordinate lb[u]
    for ca, cb in zip(la, lb):
        pa, fa = ca >> 1, ca & 1
        pb, fb = cb >> 1, cb & 1
        perm[pa] = pb
        flips[pa] = fa ^ fb
    return CubeSymmetry(tuple(perm), tuple(flips))


def hyperbolize(C: CubeComplex, X: PieceModel) -> HyperbolizedComplex:
    """Assemble H_X(C): one piece per top cube, glued along shared facets."""
    n = C.dim
    if X.dim != n:
        raise ValueError(f"piece has dimension {X.dim}, complex has dimension {n}")
    fold = folding(C)
    if fold is None:
        raise ValueError("complex is not foldable")
    low = _maximal_low_cells(C)
    if low:
        k, c = low[0]
        raise ValueError(f"cell ({k},{c}) is maximal but has dimension {k} < {n}")
    multi = [f for f in X.faces() if X.components(f) > 1 and X.face_dim(f) < n]
    if multi:
        raise MultiComponentFaceError(
            f"piece face {multi[0]} has {X.components(multi[0])} components; refusing to choose a gluing"
        )
    charts = [fold.chart(C, c) for c in range(C.counts[n])]
    gluings = []
    boundary = []
    for f, sides in sorted(_facet_incidence(C).items()):
        if len(sides) == 1:
            boundary.append(sides[0])
            continue
        c, s = sides[0]
        for d, t in sides[1:]:
            label = charts[d].inverse() * charts[c]
            if label != _facet_transfer(C, c, s, d, t):
                raise AssertionError(f"folding disagrees with the facet identification of cells {c} and {d}")
            gluings.append(Gluing(c, s, d, t, label))
    H = HyperbolizedComplex(n, charts, gluings, sorted(boundary), X, C)
    problems = H.check()
    if problems:
        raise AssertionError(problems[0])
    return H


# ---------------------------------------------------------------------------
# group actions on pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PieceAction:
    """Piece sigma goes to targets[sigma] via the local-frame map local[sigma]."""

    targets: tuple[int, ...]
    local: tuple[CubeSymmetry, ...]

    @classmethod
    def identity(cls, count: int, n: int) -> "PieceAction":
        return cls(tuple(range(count)), (CubeSymmetry.identity(n),) * count)

    def __mul__(self, other: "PieceAction") -> "PieceAction":
        # apply other first
        return PieceAction(
            tuple(self.targets[t] for t in other.targets),
            tuple(self.local[t] * m for t, m in zip(other.targets, other.local)),
        )

    def is_identity(self) -> bool:
        return self.targets == tuple(range(len(self.targets))) and all(m.is_identity() for m in self.local)

    def on_piece(self, H: HyperbolizedComplex, sigma: int) -> CubeSymmetry:
        """gamma_sigma = h_{gamma sigma} o local o h_sigma^{-1}, an isometry of the model cube."""
        return H.charts[self.targets[sigma]] * self.local[sigma] * H.charts[sigma].inverse()


def lift_deck_action(H: HyperbolizedComplex, automorphism: Sequence) -> PieceAction:
    """Lift a cellular automorphism of the underlying complex to the pieces.

    ``automorphism`` lists, per top cell, ``(image cell, local map)`` where
    the local map is a CubeSymmetry or a tuple of flips (diagonal case).
    """
    n = H.dim
    targets = []
    local = []
    for entry in automorphism:
        tgt, m = entry
        if not isinstance(m, CubeSymmetry):
            m = CubeSymmetry(tuple(range(n)), tuple(m))
        targets.append(tgt)
        local.append(m)
    if len(targets) != H.piece_count or sorted(targets) != list(range(H.piece_count)):
        raise ValueError("automorphism does not permute the top cells")
    act = PieceAction(tuple(targets), tuple(local))
    table = H.gluing_table()
    for g in H.gluings:
        # the image of a gluing must be a gluing with the conjugated label
        a2, b2 = act.targets[g.piece_a], act.targets[g.piece_b]
        sa2 = _sym_slot(act.local[g.piece_a], g.slot_a)
        sb2 = _sym_slot(act.local[g.piece_b], g.slot_b)
        want = act.local[g.piece_b] * g.label * act.local[g.piece_a].inverse()
        if not any(h.piece_b == b2 and h.slot_b == sb2 and h.label == want for h in table.get((a2, sa2), [])):
            raise ValueError(f"automorphism is not cellular on the gluing {g}")
    return act


def translation_action(C: CubeComplex, H: HyperbolizedComplex, vector: Sequence[int]) -> PieceAction:
    """Lift of the translation x -> x + vector on a coordinate complex."""
    from .bieberbach import AffineIsometry, cell_automorphism

    return lift_deck_action(H, cell_automorphism(C, AffineIsometry.translation_by(vector)))


def _closure(gens: Sequence[PieceAction], count: int, n: int) -> list[PieceAction]:
    ident = PieceAction.identity(count, n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return list(seen)


def quotient_pieces(H: HyperbolizedComplex, generators: Sequence[PieceAction]) -> tuple[HyperbolizedComplex, int]:
    """Quotient of H by the group generated by free piece actions, and its degree."""
    n = H.dim
    group = _closure(generators, H.piece_count, n)
    for g in group:
        if g.is_identity():
            continue
        for sigma, t in enumerate(g.targets):
            if t == sigma:
                raise ValueError(f"action is not free: a nontrivial element fixes piece {sigma}")
    order = len(group)
    rep_of: dict[int, tuple[int, CubeSymmetry]] = {}
    reps = []
    for sigma in range(H.piece_count):
        if sigma in rep_of:
            continue
        q = len(reps)
        reps.append(sigma)
        for g in group:
            rep_of[g.targets[sigma]] = (q, g.local[sigma])
    charts = [H.charts[s] for s in reps]
    gluings = []
    seen = set()
    for gl in H.gluings:
        qa, ma = rep_of[gl.piece_a]
        qb, mb = rep_of[gl.piece_b]
        label = mb.inverse() * gl.label * ma
        sa = _sym_slot(ma.inverse(), gl.slot_a)
        sb = _sym_slot(mb.inverse(), gl.slot_b)
        key = frozenset([(qa, sa), (qb, sb)])
        if key in seen:
            continue
        seen.add(key)
        gluings.append(Gluing(qa, sa, qb, sb, label))
    boundary = sorted({(rep_of[p][0], _sym_slot(rep_of[p][1].inverse(), s)) for p, s in H.boundary})
    Q = HyperbolizedComplex(n, charts, gluings, boundary, H.piece, None)
    return Q, order


# ---------------------------------------------------------------------------
# covering degrees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeChain:
    d1: int  # common cover -> H(C)
    d2: int
    n: int

    @property
    def source_degree(self) -> int:
        """Degree of the common cover over the closed manifold built from one piece."""
        return self.d2 * (1 << self.n)

    @property
    def bound(self) -> Fraction:
        return injrad_bound(self.d2, self.n)


def chain_degrees(groups: Sequence) -> list[int]:
    """Step indices [H_i : H_{i+1}] along a descending chain of groups."""
    from .bieberbach import group_index

    if len(groups) < 2:
        raise ValueError("a chain needs at least two groups")
    return [group_index(a, b) for a, b in zip(groups, groups[1:])]


def common_cover_lattice(G):
    """The lattice group Lambda cap (2Z)^n for the translation lattice Lambda of G."""
    from .bieberbach import AffineIsometry, DiagonalBieberbachGroup, lattice_hnf

    n = G.n
    basis = [[int(x) for x in row] for row in G.translation_lattice()]
    rows = [sum(1 << j for j, a in enumerate(r) if a % 2) for r in basis]
    if n > 16:
        raise ValueError("common cover lattice is limited to n <= 16")
    # left kernel of the basis mod 2: combinations c with c.B even
    kernel = []
    for c in itertools.product((0, 1), repeat=n):
        acc = 0
        for ci, r in zip(c, rows):
            if ci:
                acc ^= r
        if acc == 0 and any(c):
            kernel.append(c)
    vecs = [[2 * x for x in r] for r in basis]
    for c in kernel:
        vecs.append([sum(ci * r[j] for ci, r in zip(c, basis)) for j in range(n)])
    hnf = lattice_hnf(vecs, n)
    gens = tuple(AffineIsometry.translation_by(r) for r in hnf)
    return DiagonalBieberbachGroup(n, gens, name="common")


def covering_degree_chain(C: CubeComplex) -> DegreeChain:
    """Degrees of the common cover R_n / Gamma' over H(C) and over the model hat torus."""
    from .bieberbach import group_index, lattice_group

    geo = C.geometry
    if geo is None:
        raise ValueError("complex carries no group; build it with quotient_cube_complex")
    G = geo.group
    if not G.is_even:
        raise ValueError("group must be normalized (translations in (2Z)^n)")
    common = common_cover_lattice(G)
    d1 = group_index(G, common)
    d2 = group_index(lattice_group(G.n, 2), common)
    return DegreeChain(d1, d2, G.n)


def injrad_bound(d2: int, n: int) -> Fraction:
    """B = 1 / (d2 * 2^n)."""
    if d2 <= 0:
        raise ValueError("d2 must be a positive integer")
    if n < 0:
        raise ValueError("n must be non-negative")
    return Fraction(1, d2 * (1 << n))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _sym_doc(s: CubeSymmetry) -> list[list[int]]:
    return [list(r) for r in s.matrix()]


def to_json_h(H: HyperbolizedComplex) -> str:
    provenance = {"piece": H.piece.tag if H.piece else None}
    if H.source is not None:
        provenance["complex_sha256"] = hashlib.sha256(to_json(H.source).encode()).hexdigest()
    doc = {
        "version": 1,
        "dim": H.dim,
        "pieces": H.piece_count,
        "charts": [_sym_doc(c) for c in H.charts],
        "gluings": [[g.piece_a, g.slot_a, g.piece_b, g.slot_b, _sym_doc(g.label)] for g in H.gluings],
        "boundary": [list(b) for b in H.boundary],
        "provenance": provenance,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _sym_from_matrix(rows) -> CubeSymmetry:
    n = len(rows)
    perm = [0] * n
    flips = [0] * n
    for p, row in enumerate(rows):
        for i, x in enumerate(row):
            if x:
                perm[i] = p
                flips[i] = 1 if x < 0 else 0
    return CubeSymmetry(tuple(perm), tuple(flips))


def from_json_h(text: str) -> HyperbolizedComplex:
    doc = json.loads(text)
    if doc.get("version") != 1:
        raise ValueError("unsupported hyperbolized complex document version")
    charts = [_sym_from_matrix(m) for m in doc["charts"]]
    gluings = [Gluing(a, sa, b, sb, _sym_from_matrix(m)) for a, sa, b, sb, m in doc["gluings"]]
    boundary = [tuple(b) for b in doc["boundary"]]
    return HyperbolizedComplex(doc["dim"], charts, gluings, boundary)
