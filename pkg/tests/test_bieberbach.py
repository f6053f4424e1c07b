from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperflat.bieberbach import (
    AffineIsometry,
    DiagonalBieberbachGroup,
    TorsionError,
    cell_automorphism,
    group_index,
    hat_torus_complex,
    lattice_exponent,
    lattice_group,
    lattice_hnf,
    lee_szczarba_group,
    normalize_even,
    orientable_double_cover,
    quotient_cube_complex,
    torus_complex,
)
from hyperflat.cube_complex import euler_characteristic, verify

half = Fraction(1, 2)


def identity_basis(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# --- isometries -------------------------------------------------------------


def test_composition_law():
    g = AffineIsometry((-1, 1), (0, half))
    h = AffineIsometry((1, -1), (1, 0))
    gh = g * h
    assert gh.signs == (-1, -1)
    assert gh.translation == (-1, half)
    x = (Fraction(3, 4), Fraction(-2))
    assert gh(x) == g(h(x))


def test_non_dyadic_rejected():
    with pytest.raises(ValueError):
        AffineIsometry((1,), (Fraction(1, 3),))
    with pytest.raises(ValueError):
        AffineIsometry((2,), (0,))


isometries = st.integers(1, 4).flatmap(
    lambda n: st.lists(
        st.builds(
            AffineIsometry,
            st.tuples(*[st.sampled_from((1, -1))] * n),
            st.tuples(*[st.fractions(max_denominator=4).filter(lambda q: q.denominator in (1, 2, 4))] * n),
        ),
        min_size=1,
        max_size=8,
    )
)


@settings(max_examples=60, deadline=None)
@given(isometries)
def test_group_laws_on_random_words(word):
    n = word[0].dim
    prod = AffineIsometry.identity(n)
    for g in word:
        prod = prod * g
        assert (g * g.inverse()).is_identity()
        assert (g.inverse() * g).is_identity()
    if len(word) >= 3:
        a, b, c = word[:3]
        assert (a * b) * c == a * (b * c)
    back = prod
    for g in reversed(word):
        back = back * g.inverse()
    assert back.is_identity()


# --- the Lee-Szczarba family ------------------------------------------------


def test_ls_two_is_klein_bottle_group():
    G = lee_szczarba_group(2)
    assert len(G.generators) == 2
    assert G.holonomy_order == 2


def test_ls_generator_square():
    g1 = lee_szczarba_group(4).generators[1]
    assert (g1 * g1) == AffineIsometry.translation_by([0, 1, 0, 0])


@pytest.mark.parametrize("n", range(2, 9))
def test_ls_orientation_character_and_holonomy(n):
    G = lee_szczarba_group(n)
    assert G.orientation_character == (1,) + (-1,) * (n - 1)
    assert G.holonomy_rank == n - 1
    assert len(G.holonomy_image()) == 1 << (n - 1)


@pytest.mark.parametrize("n", range(2, 13))
def test_bieberbach_certificate(n):
    G = lee_szczarba_group(n)
    vecs = [G.generators[0].translation] + [(g * g).translation for g in G.generators[1:]]
    assert lattice_hnf([[int(t) for t in v] for v in vecs], n) == [[int(i == j) for j in range(n)] for i in range(n)]


@pytest.mark.parametrize("n", range(2, 6))
def test_translation_lattice_is_standard(n):
    assert lee_szczarba_group(n).translation_lattice() == identity_basis(n)


def test_ls_needs_two_dimensions():
    with pytest.raises(ValueError):
        lee_szczarba_group(1)


# --- normalization and covers -----------------------------------------------


def test_normalize_examples():
    G = normalize_even(lee_szczarba_group(2))
    assert G.generators[1] == AffineIsometry((-1, 1), (0, 2))
    assert G.generators[0] == AffineIsometry.translation_by([4, 0])
    assert G.is_even
    I = DiagonalBieberbachGroup(2, (AffineIsometry.identity(2),))
    assert normalize_even(I).generators[0].is_identity()


def test_normalize_rejects_quarter_translations():
    G = DiagonalBieberbachGroup(1, (AffineIsometry((1,), (Fraction(1, 4),)),))
    with pytest.raises(ValueError):
        normalize_even(G)


@pytest.mark.parametrize("n", range(2, 9))
def test_orientation_kernel_drops_holonomy_rank(n):
    G = lee_szczarba_group(n)
    H, proper = orientable_double_cover(G)
    assert proper
    assert H.is_orientable
    assert H.holonomy_rank == G.holonomy_rank - 1


def test_orientable_input_is_returned_unchanged():
    T = lattice_group(3)
    H, proper = orientable_double_cover(T)
    assert H is T and not proper


def test_klein_bottle_cover_is_a_torus_group():
    H, _ = orientable_double_cover(lee_szczarba_group(2))
    assert all(g.is_translation() for g in H.generators)
    assert H.translation_lattice() == identity_basis(2)


@pytest.mark.parametrize("n", range(2, 6))
def test_orientation_kernel_has_index_two(n):
    G = normalize_even(lee_szczarba_group(n))
    H, _ = orientable_double_cover(G)
    assert group_index(G, H) == 2


# --- lattices ---------------------------------------------------------------


def test_lattice_helpers():
    basis = lattice_hnf([[2, 0], [1, 3]], 2)
    assert basis[0][0] * basis[1][1] == 6
    assert lattice_exponent(basis) == 6
    assert lattice_exponent(lattice_hnf([[4, 0], [0, 4]], 2)) == 4
    with pytest.raises(ValueError):
        lattice_hnf([[1, 1], [2, 2]], 2)


# --- quotient complexes -----------------------------------------------------


def test_klein_bottle_cubulation():
    C = quotient_cube_complex(normalize_even(lee_szczarba_group(2)))
    assert C.counts == [8, 16, 8]
    assert euler_characteristic(C) == 0
    assert verify(C) == []
    assert C.flags["orientable"] is False


@pytest.mark.parametrize("n", range(2, 6))
def test_ls_cubulation_counts(n):
    C = quotient_cube_complex(normalize_even(lee_szczarba_group(n)))
    assert C.counts[0] == C.counts[n] == 1 << (n + 1)
    assert verify(C) == []


@pytest.mark.parametrize("n", range(1, 5))
def test_hat_torus_counts(n):
    C = hat_torus_complex(n)
    assert C.counts[0] == 1 << n
    assert C.flags["orientable"]


def test_index_two_subgroup_doubles_cells():
    G = normalize_even(lee_szczarba_group(3))
    H, _ = orientable_double_cover(G)
    C, D = quotient_cube_complex(G), quotient_cube_complex(H)
    assert D.counts == [2 * c for c in C.counts]


def test_non_normalized_input_rejected():
    with pytest.raises(ValueError):
        quotient_cube_complex(lee_szczarba_group(2))
    with pytest.raises(ValueError):
        quotient_cube_complex(lattice_group(2, 1))
    assert torus_complex(2).counts == [1, 2, 1]


def test_reflection_group_has_a_torsion_witness():
    G = DiagonalBieberbachGroup(1, (AffineIsometry((-1,), (0,)), AffineIsometry.translation_by([2])))
    with pytest.raises(TorsionError) as info:
        quotient_cube_complex(G)
    assert info.value.element is not None


def test_cell_automorphism_checks_normalizer():
    C = hat_torus_complex(2)
    images = cell_automorphism(C, AffineIsometry.translation_by([1, 0]))
    assert sorted(c for c, _ in images) == list(range(C.counts[2]))
    L = quotient_cube_complex(normalize_even(lee_szczarba_group(3)))
    with pytest.raises(ValueError):
        cell_automorphism(L, AffineIsometry.translation_by([1, 0, 0]))
    with pytest.raises(ValueError):
        cell_automorphism(C, AffineIsometry.translation_by([half, 0]))
