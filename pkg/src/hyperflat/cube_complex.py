"""Finite cube complexes given by facet incidences.

A k-cell has 2k facet slots; slot ``2*a + side`` is the facet obtained by
fixing local coordinate ``a`` to ``side``.  Each slot holds the facet's id
together with a label: for every local coordinate t of the facet, the code
``2*p + flip`` says it lands on parent coordinate p, reversed iff flip.
Corners of every cell are recovered recursively from these labels, which
is all the link and folding code needs.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Optional, Sequence

__all__ = [
    "CubeSymmetry",
    "CubeComplex",
    "FoldingMap",
    "Cover",
    "verify",
    "folding",
    "check_folding",
    "vertex_links",
    "is_npc",
    "is_flat",
    "euler_characteristic",
    "cover",
    "from_corner_lists",
    "single_cube",
    "to_json",
    "from_json",
    "JSON_VERSION",
]

JSON_VERSION = 1

Label = tuple[int, ...]
Slot = Optional[tuple[int, Label]]


@dataclass(frozen=True)
class CubeSymmetry:
    """Element of B_n: local coordinate i goes to coordinate perm[i], reversed iff flips[i]."""

    perm: tuple[int, ...]
    flips: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.flips) != len(self.perm):
            raise ValueError("not a signed permutation")

    @classmethod
    def identity(cls, n: int) -> "CubeSymmetry":
        return cls(tuple(range(n)), (0,) * n)

    @classmethod
    def reflection(cls, n: int, i: int) -> "CubeSymmetry":
        return cls(tuple(range(n)), tuple(1 if j == i else 0 for j in range(n)))

    @classmethod
    def all(cls, n: int):
        for p in itertools.permutations(range(n)):
            for f in itertools.product((0, 1), repeat=n):
                yield cls(p, f)

    @property
    def dim(self) -> int:
        return len(self.perm)

    def apply_corner(self, corner: int) -> int:
        out = 0
        for i, (p, f) in enumerate(zip(self.perm, self.flips)):
            if (corner >> i & 1) ^ f:
                out |= 1 << p
        return out

    def __mul__(self, other: "CubeSymmetry") -> "CubeSymmetry":
        # (self * other) applies other first
        perm = tuple(self.perm[p] for p in other.perm)
        flips = tuple(other.flips[i] ^ self.flips[other.perm[i]] for i in range(self.dim))
        return CubeSymmetry(perm, flips)

    def inverse(self) -> "CubeSymmetry":
        perm = [0] * self.dim
        flips = [0] * self.dim
        for i, (p, f) in enumerate(zip(self.perm, self.flips)):
            perm[p] = i
            flips[p] = f
        return CubeSymmetry(tuple(perm), tuple(flips))

    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """Linear part as a signed permutation matrix acting on [-1,1]^n."""
        rows = [[0] * self.dim for _ in range(self.dim)]
        for i, (p, f) in enumerate(zip(self.perm, self.flips)):
            rows[p][i] = -1 if f else 1
        return tuple(tuple(r) for r in rows)

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.dim)) and not any(self.flips)


def _decode(label: Label) -> list[tuple[int, int]]:
    return [(c >> 1, c & 1) for c in label]


@dataclass(eq=False)
class CubeComplex:
    """Cells per dimension with dense ids; ``facets[k][c][slot]`` for k >= 1."""

    dim: int
    counts: list[int]
    facets: list[list[list[Slot]]]
    folding: Optional[tuple[int, ...]] = None
    flags: dict = field(default_factory=dict)
    geometry: Any = field(default=None, repr=False)

    def __eq__(self, other):
        if not isinstance(other, CubeComplex):
            return NotImplemented
        return to_json(self) == to_json(other)

    @property
    def top_count(self) -> int:
        return self.counts[self.dim] if self.counts else 0

    def facet(self, k: int, c: int, slot: int) -> Slot:
        return self.facets[k][c][slot]

    @cached_property
    def corners(self) -> list[list[list[tuple[int, tuple[tuple[int, int], ...]]]]]:
        """corners[k][c][eps] = (vertex id, edge-end per local direction).

        An edge-end is ``(edge id, end)``.  Requires a complete complex.
        """
        out = [[[(v, ())] for v in range(self.counts[0])]]
        if self.dim >= 1:
            layer = []
            for e in range(self.counts[1]):
                row = []
                for side in (0, 1):
                    v, _ = self.facets[1][e][side]
                    row.append((v, ((e, side),)))
                layer.append(row)
            out.append(layer)
        for k in range(2, self.dim + 1):
            layer = []
            for c in range(self.counts[k]):
                row = []
                for eps in range(1 << k):
                    vertex = self._through(out, k, c, 0, eps)[0]
                    ends = []
                    for a in range(k):
                        b = 1 if a == 0 else 0
                        _, fends, t = self._through(out, k, c, b, eps, track=a)
                        ends.append(fends[t])
                    row.append((vertex, tuple(ends)))
                layer.append(row)
            out.append(layer)
        return out

    def _through(self, out, k, c, b, eps, track=None):
        # corner eps of cell (k, c) read through the facet at coordinate b
        side = eps >> b & 1
        f, label = self.facets[k][c][2 * b + side]
        local = 0
        t_of = None
        for t, (p, flip) in enumerate(_decode(label)):
            if (eps >> p & 1) ^ flip:
                local |= 1 << t
            if p == track:
                t_of = t
        v, ends = out[k - 1][f][local]
        return v, ends, t_of


# ---------------------------------------------------------------------------
# structural verification
# ---------------------------------------------------------------------------


def _label_ok(label, k) -> bool:
    if not isinstance(label, tuple) or len(label) != k - 1:
        return False
    coords = [c >> 1 for c in label]
    return all(isinstance(c, int) and c >= 0 for c in label) and len(set(coords)) == k - 1 and all(
        0 <= p < k for p in coords
    )


def verify(C: CubeComplex) -> list[str]:
    """Structural violations; empty iff the complex is well formed."""
    bad: list[str] = []
    if len(C.counts) != C.dim + 1:
        return [f"expected {C.dim + 1} cell counts, got {len(C.counts)}"]
    if len(C.facets) != C.dim + 1:
        return [f"expected facet data for {C.dim + 1} dimensions, got {len(C.facets)}"]
    for k in range(C.dim + 1):
        if len(C.facets[k]) != C.counts[k]:
            bad.append(f"dimension {k}: {C.counts[k]} cells but {len(C.facets[k])} facet rows")
            continue
        for c, slots in enumerate(C.facets[k]):
            if len(slots) != 2 * k:
                bad.append(f"cell ({k},{c}) has {len(slots)} slots, expected {2 * k}")
                continue
            for s, entry in enumerate(slots):
                if entry is None:
                    bad.append(f"cell ({k},{c}) slot {s} is unfilled")
                    continue
                f, label = entry
                if not 0 <= f < C.counts[k - 1]:
                    bad.append(f"cell ({k},{c}) slot {s} points to missing facet {f}")
                elif not _label_ok(label, k) or any(c_ >> 1 == s >> 1 for c_ in label):
                    bad.append(f"cell ({k},{c}) slot {s} has a malformed label {label}")
    if bad:
        return bad
    bad.extend(_boundary_of_boundary(C))
    if not bad and C.folding is not None:
        bad.extend(check_folding(C, C.folding))
    return bad


def _codim2(C: CubeComplex, k: int, c: int, a: int, sa: int, b: int, sb: int):
    # reach the face {x_a = sa, x_b = sb} through facet a first
    f, label = C.facets[k][c][2 * a + sa]
    dec = _decode(label)
    t = next(i for i, (p, _) in enumerate(dec) if p == b)
    side = sb ^ dec[t][1]
    g, label2 = C.facets[k - 1][f][2 * t + side]
    mapping = tuple((dec[p][0], dec[p][1] ^ flip) for p, flip in _decode(label2))
    return g, mapping


def _boundary_of_boundary(C: CubeComplex) -> list[str]:
    bad = []
    for k in range(2, C.dim + 1):
        for c in range(C.counts[k]):
            for a, b in itertools.combinations(range(k), 2):
                for sa in (0, 1):
                    for sb in (0, 1):
                        one = _codim2(C, k, c, a, sa, b, sb)
                        two = _codim2(C, k, c, b, sb, a, sa)
                        if one != two:
                            bad.append(
                                f"cell ({k},{c}): face x{a}={sa}, x{b}={sb} reached as {one} and {two}"
                            )
    return bad


# ---------------------------------------------------------------------------
# foldings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldingMap:
    """Vertex labels in {0,1}^n (bitmasks); cells map to faces of the n-cube."""

    n: int
    vertex_labels: tuple[int, ...]

    def cell_face(self, C: CubeComplex, k: int, c: int) -> tuple[int, tuple[int, ...]]:
        """(base corner, coordinate of each local direction) of the image face."""
        corners = C.corners[k][c]
        base = self.vertex_labels[corners[0][0]]
        dirs = []
        for a in range(k):
            d = self.vertex_labels[corners[1 << a][0]] ^ base
            dirs.append(d.bit_length() - 1)
        return base, tuple(dirs)

    def chart(self, C: CubeComplex, c: int) -> CubeSymmetry:
        """The folding restricted to top cell c, as an element of B_n."""
        base, dirs = self.cell_face(C, C.dim, c)
        return CubeSymmetry(dirs, tuple(base >> p & 1 for p in dirs))


def check_folding(C: CubeComplex, labels: Sequence[int]) -> list[str]:
    n = C.dim
    bad = []
    if len(labels) != C.counts[0]:
        return [f"folding has {len(labels)} labels for {C.counts[0]} vertices"]
    if any(not 0 <= x < (1 << n) for x in labels):
        return ["folding label outside {0,1}^n"]
    for k in range(1, n + 1):
        for c in range(C.counts[k]):
            corners = C.corners[k][c]
            base = labels[corners[0][0]]
            dirs = []
            for a in range(k):
                d = labels[corners[1 << a][0]] ^ base
                if d == 0 or d & (d - 1):
                    dirs.append(None)
                else:
                    dirs.append(d)
            if None in dirs or len(set(dirs)) != k:
                bad.append(f"folding is not injective on cell ({k},{c})")
                continue
            for eps in range(1 << k):
                want = base
                for a in range(k):
                    if eps >> a & 1:
                        want ^= dirs[a]
                if labels[corners[eps][0]] != want:
                    bad.append(f"folding is not affine on cell ({k},{c})")
                    break
    return bad


def _edge_colors(C: CubeComplex) -> Optional[dict[int, int]]:
    n = C.dim
    parent = list(range(C.counts[1]))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in range(2, n + 1):
        for corners in C.corners[k]:
            for a in range(k):
                edges = {ends[a][0] for _, ends in corners}
                it = iter(edges)
                r = find(next(it))
                for e in it:
                    parent[find(e)] = r

    def classes(k, c):
        return [find(C.corners[k][c][0][1][a][0]) for a in range(k)]

    color: dict[int, int] = {}
    # top cells first, spreading across shared facets
    top = C.counts[n]
    adjacent = defaultdict(list)
    for c in range(top):
        for f, _ in C.facets[n][c]:
            adjacent[f].append(c)
    done = [False] * top
    for start in range(top):
        if done[start]:
            continue
        queue = deque([start])
        done[start] = True
        while queue:
            c = queue.popleft()
            cls = classes(n, c)
            if len(set(cls)) != n:
                return None
            used = {color[x] for x in cls if x in color}
            if len(used) != sum(1 for x in cls if x in color):
                return None
            free = iter(sorted(set(range(n)) - used))
            for x in cls:
                if x not in color:
                    color[x] = next(free)
            for f, _ in C.facets[n][c]:
                for d in adjacent[f]:
                    if not done[d]:
                        done[d] = True
                        queue.append(d)
    # lower-dimensional maximal cells
    for k in range(n - 1, 0, -1):
        for c in range(C.counts[k]):
            cls = classes(k, c)
            if len(set(cls)) != k:
                return None
            used = {color[x] for x in cls if x in color}
            free = iter(sorted(set(range(n)) - used))
            for x in cls:
                if x not in color:
                    color[x] = next(free)
    for k in range(1, n + 1):
        for c in range(C.counts[k]):
            cols = [color[x] for x in classes(k, c)]
            if len(set(cols)) != k:
                return None
    return {e: color[find(e)] for e in range(C.counts[1])}


def _search_folding(C: CubeComplex) -> Optional[tuple[int, ...]]:
    n = C.dim
    if n == 0:
        return (0,) * C.counts[0]
    colors = _edge_colors(C)
    if colors is None:
        return None
    nbrs = defaultdict(list)
    for e in range(C.counts[1]):
        (u, _), (w, _) = C.facets[1][e]
        if u == w:
            return None
        nbrs[u].append((w, colors[e]))
        nbrs[w].append((u, colors[e]))
    labels: list[Optional[int]] = [None] * C.counts[0]
    starts = []
    if C.counts[n]:
        starts.append(C.corners[n][0][0][0])
    starts.extend(range(C.counts[0]))
    for s in starts:
        if labels[s] is not None:
            continue
        labels[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w, col in nbrs[u]:
                want = labels[u] ^ (1 << col)
                if labels[w] is None:
                    labels[w] = want
                    queue.append(w)
                elif labels[w] != want:
                    return None
    out = tuple(labels)
    if check_folding(C, out):
        return None
    return out


def folding(C: CubeComplex) -> Optional[FoldingMap]:
    """A folding onto the n-cube, or None when none exists.

    Complexes that carry a coordinate folding return it unchanged; others
    get one by propagating edge colors from the first top cube, which is
    pinned to the identity chart.
    """
    if C.folding is not None and not check_folding(C, C.folding):
        return FoldingMap(C.dim, tuple(C.folding))
    labels = _search_folding(C)
    return None if labels is None else FoldingMap(C.dim, labels)


# ---------------------------------------------------------------------------
# links, curvature and flatness
# ---------------------------------------------------------------------------


@dataclass
class Link:
    vertex: int
    points: set
    simplices: set
    degenerate: bool = False  # a cell meets the vertex in a non-simplex


def vertex_links(C: CubeComplex) -> list[Link]:
    links = [Link(v, set(), set()) for v in range(C.counts[0])]
    for k in range(1, C.dim + 1):
        for corners in C.corners[k]:
            for v, ends in corners:
                lk = links[v]
                s = frozenset(ends)
                if len(s) != k:
                    lk.degenerate = True
                    continue
                if s in lk.simplices:
                    lk.degenerate = True
                lk.simplices.add(s)
                lk.points.update(s)
    return links


def _flag(link: Link, max_size: int) -> bool:
    adj = defaultdict(set)
    for s in link.simplices:
        if len(s) == 2:
            a, b = tuple(s)
            adj[a].add(b)
            adj[b].add(a)
    order = sorted(link.points)
    rank = {p: i for i, p in enumerate(order)}

    def grow(clique: list, candidates: set) -> bool:
        for p in sorted(candidates, key=rank.get):
            nxt = clique + [p]
            if len(nxt) >= 3 and frozenset(nxt) not in link.simplices:
                return False
            if len(nxt) > max_size:
                return False
            rest = {q for q in candidates & adj[p] if rank[q] > rank[p]}
            if rest and not grow(nxt, rest):
                return False
        return True

    return grow([], set(order))


def is_npc(C: CubeComplex) -> bool:
    """Gromov's link condition: every vertex link is a flag simplicial complex."""
    for link in vertex_links(C):
        if link.degenerate or not _flag(link, C.dim):
            return False
    return True


def _is_cross_polytope_boundary(link: Link, n: int) -> bool:
    if len(link.points) != 2 * n:
        return False
    edges = {s for s in link.simplices if len(s) == 2}
    missing = defaultdict(set)
    pts = sorted(link.points)
    for a, b in itertools.combinations(pts, 2):
        if frozenset((a, b)) not in edges:
            missing[a].add(b)
            missing[b].add(a)
    if any(len(missing[p]) != 1 for p in pts):
        return False
    tops = sum(1 for s in link.simplices if len(s) == n)
    return tops == 1 << n


def is_flat(C: CubeComplex) -> bool:
    """NPC with every vertex link the boundary of the n-dimensional cross-polytope."""
    if C.dim < 1 or not is_npc(C):
        return False
    return all(_is_cross_polytope_boundary(lk, C.dim) for lk in vertex_links(C))


def euler_characteristic(C: CubeComplex) -> int:
    return sum((-1) ** k * c for k, c in enumerate(C.counts))


# ---------------------------------------------------------------------------
# covers of coordinate complexes
# ---------------------------------------------------------------------------


@dataclass
class Cover:
    complex: CubeComplex
    base: CubeComplex
    degree: int
    # cell_map[k][c] = (base cell id, local flips)
    cell_map: list[list[tuple[int, tuple[int, ...]]]]


def cover(C: CubeComplex, subgroup) -> Cover:
    """Quotient by a finite-index subgroup of the deck group of C.

    ``subgroup`` is a DiagonalBieberbachGroup contained in the deck group,
    the string ``"orientation"`` for the orientation kernel, or an integer
    m for the translation lattice (mZ)^n.
    """
    from . import bieberbach as bb

    geo = C.geometry
    if geo is None:
        raise ValueError("cover needs a complex built by quotient_cube_complex")
    G = geo.group
    if subgroup == "orientation":
        H, proper = bb.orientable_double_cover(G)
        if not proper:
            raise ValueError("deck group is already orientation preserving")
    elif isinstance(subgroup, int) and not isinstance(subgroup, bool):
        if subgroup < 1:
            raise ValueError("lattice scale must be positive")
        H = bb.lattice_group(G.n, subgroup)
    elif isinstance(subgroup, bb.DiagonalBieberbachGroup):
        H = subgroup
    else:
        raise TypeError(f"unsupported subgroup {subgroup!r}")
    if H.n != G.n:
        raise ValueError("subgroup has the wrong dimension")
    for h in H.generators:
        if not G.contains(h):
            raise ValueError("subgroup is not contained in the deck group")
    try:
        H.box_size
    except ValueError as exc:
        raise ValueError(f"subgroup is not of finite index: {exc}") from exc
    D = bb.quotient_cube_complex(H, require_even=C.folding is not None and H.is_even)
    hg = D.geometry
    cell_map = []
    for k in range(C.dim + 1):
        row = []
        for v, S in hg.reps[k]:
            cid, eps = geo.locate((v, S))
            row.append((cid, tuple(1 if eps[a] < 0 else 0 for a in range(C.dim) if S >> a & 1)))
        cell_map.append(row)
    degree = bb.group_index(G, H)
    for k in range(C.dim + 1):
        if D.counts[k] != degree * C.counts[k]:
            raise AssertionError(f"dimension {k}: {D.counts[k]} cells over {C.counts[k]} at degree {degree}")
    return Cover(D, C, degree, cell_map)


# ---------------------------------------------------------------------------
# construction from corner lists
# ---------------------------------------------------------------------------


def _face_corners(corners: tuple, k: int, fixed: dict[int, int]) -> tuple:
    free = [a for a in range(k) if a not in fixed]
    out = []
    for local in range(1 << len(free)):
        eps = 0
        for a, s in fixed.items():
            eps |= s << a
        for t, a in enumerate(free):
            eps |= (local >> t & 1) << a
        out.append(corners[eps])
    return tuple(out)


def from_corner_lists(dim: int, cubes: Sequence[Sequence[Hashable]]) -> CubeComplex:
    """Build a complex from cubes given by their 2^k corner vertex names.

    Corner ``eps`` (a bitmask) of a k-cube is entry ``eps`` of its list.
    Faces with equal corner sets up to cube symmetry are identified.
    """
    names: dict = {}
    cells: list[dict] = [dict() for _ in range(dim + 1)]
    facets: list[list] = [[] for _ in range(dim + 1)]
    syms = {k: list(CubeSymmetry.all(k)) for k in range(dim + 1)}

    def key(x):
        return names.setdefault(x, len(names))

    def register(corners: tuple) -> tuple[int, CubeSymmetry]:
        k = (len(corners) - 1).bit_length()
        if len(corners) != 1 << k:
            raise ValueError("corner list length must be a power of two")
        if k > dim:
            raise ValueError("cube larger than the declared dimension")
        best = None
        for g in syms[k]:
            cand = tuple(key(corners[g.apply_corner(e)]) for e in range(1 << k))
            if best is None or cand < best[0]:
                best = (cand, g)
        canon, g = best
        table = cells[k]
        if canon not in table:
            table[canon] = len(table)
            ordered = tuple(corners[g.apply_corner(e)] for e in range(1 << k))
            slots = []
            for a in range(k):
                rest = [b for b in range(k) if b != a]
                for side in (0, 1):
                    fid, h = register(_face_corners(ordered, k, {a: side}))
                    label = tuple(2 * rest[h.perm[t]] + h.flips[t] for t in range(k - 1))
                    slots.append((fid, label))
            facets[k].append(slots)
        return table[canon], g

    for cube in cubes:
        register(tuple(cube))
    counts = [len(t) for t in cells]
    return CubeComplex(dim=dim, counts=counts, facets=facets)


def single_cube(n: int) -> CubeComplex:
    return from_corner_lists(n, [list(range(1 << n))])


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def to_json(C: CubeComplex) -> str:
    entries = []
    for k in range(1, C.dim + 1):
        for c, slots in enumerate(C.facets[k]):
            for s, entry in enumerate(slots):
                if entry is not None:
                    f, label = entry
                    entries.append([k, c, s, f, list(label)])
    doc = {
        "version": JSON_VERSION,
        "dim": C.dim,
        "cells": list(C.counts),
        "facets": entries,
        "folding": None if C.folding is None else list(C.folding),
        "flags": dict(C.flags),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def from_json(text: str) -> CubeComplex:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != JSON_VERSION:
        raise ValueError("unsupported cube complex document version")
    try:
        dim = int(doc["dim"])
        counts = [int(x) for x in doc["cells"]]
        if len(counts) != dim + 1 or any(x < 0 for x in counts):
            raise ValueError("cell counts do not match the dimension")
        facets: list[list[list[Slot]]] = [[[None] * (2 * k) for _ in range(counts[k])] for k in range(dim + 1)]
        for k, c, s, f, label in doc["facets"]:
            if not 1 <= k <= dim or not 0 <= c < counts[k] or not 0 <= s < 2 * k:
                raise ValueError(f"facet entry {[k, c, s]} is out of range")
            facets[k][c][s] = (int(f), tuple(int(x) for x in label))
        fold = doc.get("folding")
        fold = None if fold is None else tuple(int(x) for x in fold)
        flags = dict(doc.get("flags") or {})
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed cube complex document: {exc}") from exc
    return CubeComplex(dim=dim, counts=counts, facets=facets, folding=fold, flags=flags)
