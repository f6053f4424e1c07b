"""
Stiefel-Whitney classes of Lee-Szczarba manifolds
=================================================

Every class lives in a small quotient ring, so vanishing questions become
exact bit-vector computations.
"""

from hyperflat.char_classes import (
    catalan,
    class_size,
    report,
    s_of,
    w_ls,
    w_square_criterion,
    w_square_structural,
)
from hyperflat.f2_quotient_ring import square

# w_j is the elementary symmetric polynomial in x_1..x_{n-1}
n = 6
for j in range(1, n + 1):
    print(f"w_{j}(LS_{n}) = {w_ls(n, j) or 0}")

# squares collapse: w_2^2 dies on LS_4 and survives on LS_6
print(square(w_ls(4, 2)))
print(square(w_ls(6, 2)))

# the closed-form criterion n >= 2k + s(k)
print([s_of(k) for k in range(1, 16)])
for k in range(1, 6):
    first = next(m for m in range(k, 40) if w_square_criterion(m, k))
    print(f"w_{k}^2 first survives at n = {first}")

# the surviving monomials come from maximal tuples with odd Catalan weight
print(w_square_structural(10, 3))
print(square(w_ls(10, 3)))

# classes of (1, 3, ..., 2m-1) under x_j^2 x_{j+1}^2 = x_j^2 x_{j+2}^2
for m in range(1, 8):
    print(m, class_size(tuple(range(1, 2 * m, 2)), 2 * m + 1), catalan(m))

# a full table, with both verdicts side by side
rep = report(10)
for k, (crit, orc) in sorted(rep.w_square.items()):
    print(k, crit, orc)
print("p mod 2:", rep.p)
