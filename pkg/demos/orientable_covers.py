"""
Classes of the orientable double cover
======================================

The cover's classes are the same polynomials read modulo the extra linear
form L = x_1 + ... + x_{n-1}.  Vanishing is decided per degree by asking
whether the class lies in the span of the L-multiples.
"""

import time

from hyperflat.char_classes import conjecture_scan, w_hat, w_hat_square
from hyperflat.f2_quotient_ring import l_multiples_rank, square_free_monomials

# w_1 always dies: it is L itself
print([w_hat(n, 1).nonzero for n in range(3, 12)])

# not spin from n = 5, not spin^c from n = 6
print([w_hat(n, 2).nonzero for n in range(3, 11)])
print([w_hat(n, 3).nonzero for n in range(3, 11)])

# the first Pontryagin class mod 2 appears at n = 8
print([w_hat_square(n, 2).nonzero for n in range(5, 12)])

# graded dimensions of the quotient by L
for n in (4, 6, 8, 10):
    dims = [len(square_free_monomials(n - 1, d)) - l_multiples_rank(n, d) for d in range(1, n)]
    print(n, dims)

# one heavy case: degree 8 at n = 16, 6435 columns
t0 = time.perf_counter()
print(w_hat_square(16, 4).nonzero, f"{time.perf_counter() - t0:.2f}s")

# scan for w_{2i}^2 on the cover, n >= 8i
for e in conjecture_scan(18, 2):
    flag = "COUNTEREXAMPLE" if e.counterexample else ""
    print(e.n, e.i, e.nonzero, flag)
