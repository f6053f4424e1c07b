"""
Flat cube complexes and their hyperbolization
=============================================

Quotients of the standard cubulation of R^n by diagonal Bieberbach groups,
then one hyperbolic piece per top cube.
"""

from hyperflat.bieberbach import (
    hat_torus_complex,
    lee_szczarba_group,
    normalize_even,
    orientable_double_cover,
    quotient_cube_complex,
    torus_complex,
)
from hyperflat.cube_complex import cover, euler_characteristic, folding, is_flat, is_npc, to_json
from hyperflat.hyperbolization import (
    PieceModel,
    covering_degree_chain,
    hyperbolize,
    quotient_pieces,
    translation_action,
)

# the Klein bottle group, scaled by 4 so that translations are even
G = normalize_even(lee_szczarba_group(2))
for g in G.generators:
    print(g.signs, g.translation)

C = quotient_cube_complex(G)
print(C.counts, euler_characteristic(C), is_npc(C), is_flat(C))
print(folding(C).vertex_labels)

# higher dimensions: 2^(n+1) vertices and top cubes
for n in range(2, 6):
    C = quotient_cube_complex(normalize_even(lee_szczarba_group(n)))
    print(n, C.counts, C.flags)

# the unit torus has a single vertex and cannot fold; its (2Z)^n cover can
print(folding(torus_complex(2)), folding(hat_torus_complex(2)) is not None)
print(cover(torus_complex(2), 2).degree)

# orientation kernel: index 2, cell counts double
H, _ = orientable_double_cover(normalize_even(lee_szczarba_group(3)))
print(quotient_cube_complex(H).counts)

# hyperbolize the hat torus, then divide by the translations {0,1}^n
n = 3
T = hat_torus_complex(n)
HT = hyperbolize(T, PieceModel(n))
acts = [translation_action(T, HT, [int(i == a) for i in range(n)]) for a in range(n)]
Q, degree = quotient_pieces(HT, acts)
print(HT.piece_count, Q.piece_count, degree)
for g in Q.gluings:
    print(g.slot_a, g.slot_b, g.label.matrix())

# covering degrees and the injectivity radius constant
C = quotient_cube_complex(normalize_even(lee_szczarba_group(3)))
chain = covering_degree_chain(C)
print(chain.d1, chain.source_degree, chain.bound)

# complexes serialize canonically
print(to_json(hat_torus_complex(1)))
