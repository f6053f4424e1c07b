"""Stiefel--Whitney and mod-2 Pontryagin classes of Lee--Szczarba manifolds.

Classes of LS_n live in F2[x_1..x_{n-1}]/I(n); those of the orientable
double cover are the same polynomials read modulo the extra linear form
x_1 + ... + x_{n-1}.  The nonvanishing of w_k^2 is decided three ways:
the closed-form criterion n >= 2k + s(k), direct squaring in the quotient
ring, and the sum over maximal tuples weighted by Catalan numbers.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Optional

from .f2_quotient_ring import (
    SquareFreePoly,
    square,
    square_free_monomials,
    vanishes_mod_L,
)

__all__ = [
    "sigma",
    "w_ls",
    "s_of",
    "w_square_criterion",
    "w_square_oracle",
    "imax_tuples",
    "CanonicalDecomposition",
    "canonical_decomposition",
    "class_size",
    "squared_class",
    "catalan",
    "catalan_is_odd",
    "lambda_of",
    "w_square_structural",
    "HatVerdict",
    "w_hat",
    "w_hat_square",
    "ClassReport",
    "report",
    "conjecture_scan",
    "DEFAULT_SCAN_CAP",
]

DEFAULT_SCAN_CAP = 24

LS = "ls"
LS_COVER = "ls-cover"


@lru_cache(maxsize=256)
def sigma(j: int, n: int) -> SquareFreePoly:
    """Elementary symmetric polynomial sigma_j(x_1..x_{n-1}); zero for j > n-1."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if j < 0:
        raise ValueError("j must be non-negative")
    return SquareFreePoly(n, frozenset(square_free_monomials(n - 1, j)))


def w_ls(n: int, j: int) -> SquareFreePoly:
    """w_j(LS_n) as a class in F2[x]/I(n)."""
    if not 0 <= j <= n:
        raise ValueError(f"need 0 <= j <= n, got j={j}, n={n}")
    return sigma(j, n)


@lru_cache(maxsize=None)
def s_of(k: int) -> int:
    """Least number of summands 2^r - 1 (r >= 0) adding up to k."""
    if k <= 0:
        raise ValueError("s(k) is defined for k >= 1")
    parts = []
    r = 1
    while (1 << r) - 1 <= k:
        parts.append((1 << r) - 1)
        r += 1
    INF = k + 1
    best = [0] + [INF] * k
    for total in range(1, k + 1):
        best[total] = min(best[total - p] + 1 for p in parts if p <= total)
    return best[k]


def w_square_criterion(n: int, k: int) -> bool:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return n >= 2 * k + s_of(k)


def w_square_oracle(n: int, k: int) -> bool:
    """Square w_k(LS_n) in the quotient ring and test for zero."""
    return bool(square(w_ls(n, k)))


def imax_tuples(n: int, k: int) -> list[tuple[int, ...]]:
    """Tuples with last entry <= n-2 and consecutive gaps >= 2, lexicographic."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if 2 * k - 1 > n - 2:
        return []
    out = []

    def extend(prefix: list[int], start: int) -> None:
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        remaining = k - len(prefix) - 1
        for i in range(start, n - 1 - 2 * remaining):
            prefix.append(i)
            extend(prefix, i + 2)
            prefix.pop()

    extend([], 1)
    return out


def _check_imax(I: tuple[int, ...], n: int) -> None:
    if not I:
        raise ValueError("empty tuple")
    if I[0] < 1 or I[-1] > n - 2 or any(b - a < 2 for a, b in zip(I, I[1:])):
        raise ValueError(f"{I} is not a maximal tuple for n={n}")


@dataclass(frozen=True)
class CanonicalDecomposition:
    blocks: tuple[tuple[int, ...], ...]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def gaps(self) -> tuple[int, ...]:
        """Differences between consecutive blocks; each is at least 3."""
        return tuple(b[0] - a[-1] for a, b in zip(self.blocks, self.blocks[1:]))

    def concatenation(self) -> tuple[int, ...]:
        return tuple(i for b in self.blocks for i in b)


def canonical_decomposition(I: tuple[int, ...]) -> CanonicalDecomposition:
    """Split I into maximal runs with step exactly 2."""
    if not I:
        raise ValueError("empty tuple")
    blocks = [[I[0]]]
    for a, b in zip(I, I[1:]):
        if b - a == 2:
            blocks[-1].append(b)
        elif b - a >= 3:
            blocks.append([b])
        else:
            raise ValueError(f"{I} has a gap smaller than 2")
    return CanonicalDecomposition(tuple(tuple(b) for b in blocks))


def _squared_moves(J: tuple[int, ...], n: int):
    # x_j^2 x_{j+1}^2 = x_j^2 x_{j+2}^2, applied in both directions
    s = set(J)
    for j in J:
        if j + 2 > n - 1:
            continue
        if j + 1 in s and j + 2 not in s:
            yield tuple(sorted(s - {j + 1} | {j + 2}))
        if j + 2 in s and j + 1 not in s:
            yield tuple(sorted(s - {j + 2} | {j + 1}))


def squared_class(I: tuple[int, ...], n: int) -> set[tuple[int, ...]]:
    """Closure of I under the squared-tuple relations."""
    seen = {tuple(I)}
    queue = deque(seen)
    while queue:
        J = queue.popleft()
        for K in _squared_moves(J, n):
            if K not in seen:
                seen.add(K)
                queue.append(K)
    return seen


def class_size(I: tuple[int, ...], n: int) -> int:
    """Size of the class of a maximal tuple, by exhaustive enumeration."""
    I = tuple(I)
    _check_imax(I, n)
    return len(squared_class(I, n))


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("m must be non-negative")
    return comb(2 * m, m) - comb(2 * m, m + 1)


def catalan_is_odd(m: int) -> bool:
    p = m + 1
    return p & (p - 1) == 0


def lambda_of(I: tuple[int, ...]) -> int:
    """Product of Catalan numbers over the canonical decomposition blocks."""
    out = 1
    for m in canonical_decomposition(tuple(I)).lengths:
        out *= catalan(m)
    return out


def _x_squared(I: tuple[int, ...], n: int) -> int:
    # for a maximal tuple x_I^2 = prod x_i x_{i+1}, already square-free
    mask = 0
    for i in I:
        mask |= (1 << (i - 1)) | (1 << i)
    return mask


def w_square_structural(n: int, k: int) -> SquareFreePoly:
    """Sum of x_I^2 over maximal tuples I whose Catalan weight is odd."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    masks = []
    for I in imax_tuples(n, k):
        if all(catalan_is_odd(m) for m in canonical_decomposition(I).lengths):
            masks.append(_x_squared(I, n))
    return SquareFreePoly.from_masks(n, masks)


@dataclass(frozen=True)
class HatVerdict:
    """Vanishing verdict for a class of the orientable double cover."""

    n: int
    degree: int
    nonzero: bool
    representative: SquareFreePoly


def _hat_verdict(poly: SquareFreePoly, degree: int) -> HatVerdict:
    nonzero = bool(poly) and not vanishes_mod_L(poly)
    return HatVerdict(poly.n, degree, nonzero, poly)


def w_hat(n: int, j: int) -> HatVerdict:
    """w_j of the orientable double cover of LS_n."""
    if n < 3:
        raise ValueError("the orientable double cover needs n >= 3")
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}, n={n}")
    return _hat_verdict(sigma(j, n), j)


def w_hat_square(n: int, k: int) -> HatVerdict:
    """w_k^2 of the orientable double cover of LS_n."""
    if n < 3:
        raise ValueError("the orientable double cover needs n >= 3")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return _hat_verdict(square(sigma(k, n)), 2 * k)


@dataclass
class ClassReport:
    """Per-degree verdicts for LS_n or its orientable double cover.

    ``w_square`` maps k to ``(criterion, oracle)``; the criterion entry is
    ``None`` where no closed form exists (the cover).  ``p`` maps i to
    whether p_i is nonzero mod 2, read off from w_{2i}^2.
    """

    n: int
    variant: str
    w: dict[int, bool] = field(default_factory=dict)
    w_square: dict[int, tuple[Optional[bool], bool]] = field(default_factory=dict)
    p: dict[int, bool] = field(default_factory=dict)

    def mismatches(self) -> list[str]:
        bad = []
        for k, (crit, orc) in self.w_square.items():
            if crit is not None and crit != orc:
                bad.append(f"n={self.n} k={k}: criterion={crit} oracle={orc}")
        for i, flag in self.p.items():
            if flag != self.w_square[2 * i][1]:
                bad.append(f"n={self.n} i={i}: p flag disagrees with w_{2 * i}^2")
        return bad

    @property
    def consistent(self) -> bool:
        return not self.mismatches()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "variant": self.variant,
            "w": {str(j): v for j, v in sorted(self.w.items())},
            "w_square": {
                str(k): {"criterion": c, "oracle": o} for k, (c, o) in sorted(self.w_square.items())
            },
            "p_mod2": {str(i): v for i, v in sorted(self.p.items())},
        }


def report(n: int, variant: str = LS) -> ClassReport:
    if variant == LS:
        if n < 2:
            raise ValueError("LS_n needs n >= 2")
        rep = ClassReport(n, variant)
        for j in range(1, n + 1):
            rep.w[j] = bool(w_ls(n, j))
        for k in range(1, n + 1):
            rep.w_square[k] = (w_square_criterion(n, k), w_square_oracle(n, k))
    elif variant == LS_COVER:
        if n < 3:
            raise ValueError("the orientable double cover needs n >= 3")
        rep = ClassReport(n, variant)
        for j in range(1, n + 1):
            rep.w[j] = w_hat(n, j).nonzero
        for k in range(1, n + 1):
            rep.w_square[k] = (None, w_hat_square(n, k).nonzero)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    for i in range(1, n // 2 + 1):
        rep.p[i] = rep.w_square[2 * i][1]
    return rep


@dataclass(frozen=True)
class ScanEntry:
    n: int
    i: int
    nonzero: bool
    proven: bool  # the nonvanishing is established in the literature

    @property
    def counterexample(self) -> bool:
        return self.proven and not self.nonzero


def _proven_nonzero(n: int, i: int) -> bool:
    # covering monotonicity carries nonvanishing upward from n=8 (i=1) and n=16 (i=2)
    return (i == 1 and n >= 8) or (i == 2 and n >= 16)


def conjecture_scan(n_max: int, i_max: int, cap: int = DEFAULT_SCAN_CAP) -> list[ScanEntry]:
    """Test w_{2i}^2 != 0 on the orientable cover for every n >= 8i up to n_max."""
    if n_max > cap:
        raise ValueError(f"n_max={n_max} exceeds the scan cap {cap}")
    out = []
    for i in range(1, i_max + 1):
        for n in range(8 * i, n_max + 1):
            nonzero = w_hat_square(n, 2 * i).nonzero
            out.append(ScanEntry(n, i, nonzero, _proven_nonzero(n, i)))
    return out


def tuples_of_length(n: int, k: int):
    """All strictly increasing k-tuples in 1..n-1."""
    return itertools.combinations(range(1, n), k)
