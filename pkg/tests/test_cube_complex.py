import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperflat.bieberbach import (
    hat_torus_complex,
    lee_szczarba_group,
    normalize_even,
    quotient_cube_complex,
    torus_complex,
)
from hyperflat.cube_complex import (
    CubeComplex,
    CubeSymmetry,
    check_folding,
    cover,
    euler_characteristic,
    folding,
    from_corner_lists,
    from_json,
    is_flat,
    is_npc,
    single_cube,
    to_json,
    verify,
    vertex_links,
)


def ls_complex(n):
    return quotient_cube_complex(normalize_even(lee_szczarba_group(n)))


def strip(C):
    """Same incidences, no coordinates and no stored folding."""
    D = from_json(to_json(C))
    D.folding = None
    return D


def cube_corner_fan():
    # the three squares of a 3-cube that contain corner 0, with no cube filling them
    cube = list(range(8))
    faces = []
    for a in range(3):
        rest = [b for b in range(3) if b != a]
        faces.append([sum(((e >> t) & 1) << rest[t] for t in range(2)) for e in range(4)])
    return from_corner_lists(2, [[cube[v] for v in f] for f in faces])


# --- cube symmetries --------------------------------------------------------


symmetries = st.integers(1, 4).flatmap(
    lambda n: st.tuples(
        st.permutations(range(n)).map(tuple), st.lists(st.sampled_from((0, 1)), min_size=n, max_size=n).map(tuple)
    ).map(lambda pf: CubeSymmetry(*pf))
)


def matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))) for i in range(len(a)))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_symmetry_group_laws(data):
    g = data.draw(symmetries)
    n = g.dim
    h = data.draw(st.tuples(st.permutations(range(n)).map(tuple), st.lists(st.sampled_from((0, 1)), min_size=n, max_size=n).map(tuple)))
    h = CubeSymmetry(*h)
    assert (g * g.inverse()).is_identity()
    assert matmul(g.matrix(), h.matrix()) == (g * h).matrix()
    for corner in range(1 << n):
        assert (g * h).apply_corner(corner) == g.apply_corner(h.apply_corner(corner))


# --- verification -----------------------------------------------------------


@pytest.mark.parametrize("n", range(0, 5))
def test_single_cube_is_valid(n):
    C = single_cube(n)
    assert verify(C) == []
    assert C.counts == [2 ** (n - k) * len(list(itertools.combinations(range(n), k))) for k in range(n + 1)]


def test_unfilled_slot_is_reported():
    C = single_cube(2)
    C.facets[2][0][3] = None
    problems = verify(C)
    assert problems and "unfilled" in problems[0]


def test_inconsistent_label_is_reported():
    C = single_cube(2)
    f, label = C.facets[2][0][0]
    C.facets[2][0][0] = (f, (label[0] ^ 1,))
    assert verify(C)


def test_bad_counts_reported():
    C = single_cube(2)
    C.counts = [4, 4]
    assert verify(C)


def test_ls_quotient_is_valid():
    assert verify(ls_complex(2)) == []


# --- foldings ---------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 4))
def test_hat_torus_folds(n):
    assert folding(hat_torus_complex(n)) is not None
    assert folding(strip(hat_torus_complex(n))) is not None


@pytest.mark.parametrize("n", range(1, 4))
def test_torus_does_not_fold(n):
    assert folding(torus_complex(n)) is None


@pytest.mark.parametrize("n", range(2, 5))
def test_ls_quotient_folds(n):
    C = ls_complex(n)
    f = folding(C)
    assert f is not None and check_folding(C, f.vertex_labels) == []
    searched = folding(strip(C))
    assert searched is not None
    assert check_folding(C, searched.vertex_labels) == []


def test_search_pins_first_cube_to_identity():
    C = strip(ls_complex(3))
    f = folding(C)
    assert f.chart(C, 0).is_identity()


def test_two_cubes_on_a_vertex_fold():
    C = from_corner_lists(2, [[0, 1, 2, 3], [3, 4, 5, 6]])
    assert folding(C) is not None


def test_odd_cycle_does_not_fold():
    # a triangle of edges admits no bipartite labelling
    C = from_corner_lists(1, [[0, 1], [1, 2], [2, 0]])
    assert folding(C) is None


# --- links ------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 5))
def test_single_cube_is_npc_not_flat(n):
    C = single_cube(n)
    assert is_npc(C)
    assert not is_flat(C)


@pytest.mark.parametrize("n", range(1, 4))
def test_hat_torus_links_are_octahedral(n):
    C = hat_torus_complex(n)
    assert is_npc(C) and is_flat(C)
    for link in vertex_links(C):
        assert len(link.points) == 2 * n


def test_empty_triangle_in_link_is_not_npc():
    C = cube_corner_fan()
    assert verify(C) == []
    assert not is_npc(C)


def test_cubes_meeting_at_a_vertex_are_not_flat():
    C = from_corner_lists(2, [[0, 1, 2, 3], [3, 4, 5, 6]])
    assert is_npc(C)
    assert not is_flat(C)


@pytest.mark.parametrize("n", range(2, 5))
def test_ls_quotient_is_flat(n):
    assert is_flat(ls_complex(n))


# --- Euler characteristic ---------------------------------------------------


def test_euler_characteristic_examples():
    assert euler_characteristic(single_cube(0)) == 1
    assert euler_characteristic(hat_torus_complex(2)) == 0
    assert euler_characteristic(single_cube(3)) == 1
    for n in range(2, 5):
        assert euler_characteristic(ls_complex(n)) == 0


# --- covers -----------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 4))
def test_torus_pulled_to_even_lattice(n):
    cov = cover(torus_complex(n), 2)
    assert cov.degree == 2**n
    assert cov.complex == hat_torus_complex(n)
    assert folding(cov.complex) is not None


@pytest.mark.parametrize("n", range(2, 5))
def test_orientation_cover_of_ls(n):
    C = ls_complex(n)
    cov = cover(C, "orientation")
    assert cov.degree == 2
    assert cov.complex.flags["orientable"]
    for k in range(n + 1):
        assert cov.complex.counts[k] == 2 * C.counts[k]
        images = [b for b, _ in cov.cell_map[k]]
        assert all(images.count(c) == 2 for c in range(C.counts[k]))


@pytest.mark.parametrize("n", range(2, 4))
def test_ls_and_hat_torus_share_a_cover(n):
    a = cover(ls_complex(n), 4)
    b = cover(hat_torus_complex(n), 4)
    assert a.complex == b.complex
    assert a.degree == 2 ** (n - 1)
    assert b.degree == 2**n


def test_cover_errors():
    with pytest.raises(ValueError):
        cover(single_cube(2), 2)
    with pytest.raises(ValueError):
        cover(hat_torus_complex(2), 3)
    with pytest.raises(ValueError):
        cover(hat_torus_complex(2), "orientation")


def test_cover_of_foldable_complex_folds():
    for n in range(2, 4):
        assert folding(strip(cover(ls_complex(n), "orientation").complex)) is not None


# --- JSON -------------------------------------------------------------------


def test_json_shape():
    doc = json.loads(to_json(single_cube(2)))
    assert doc["version"] == 1
    assert doc["cells"] == [4, 4, 1]
    assert len(doc["facets"]) == 4 * 2 + 4
    assert doc["folding"] is None


@pytest.mark.parametrize("build", [lambda: single_cube(3), lambda: ls_complex(3), lambda: torus_complex(2), cube_corner_fan])
def test_json_round_trip_is_bit_exact(build):
    text = to_json(build())
    again = to_json(from_json(text))
    assert again == text


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 9), min_size=4, max_size=4, unique=True), min_size=1, max_size=5))
def test_random_square_complexes_round_trip(squares):
    C = from_corner_lists(2, squares)
    assert verify(C) == []
    text = to_json(C)
    assert to_json(from_json(text)) == text


@pytest.mark.parametrize(
    "text",
    ["{", "[]", '{"version":2}', '{"version":1,"dim":1,"cells":[1],"facets":[]}', '{"version":1,"dim":1,"cells":[1,1],"facets":[[1,5,0,0,[]]]}'],
)
def test_corrupted_json_is_rejected(text):
    with pytest.raises(ValueError):
        from_json(text)


def test_json_missing_slot_parses_but_fails_verification():
    doc = json.loads(to_json(single_cube(2)))
    doc["facets"].pop()
    C = from_json(json.dumps(doc))
    assert isinstance(C, CubeComplex)
    assert verify(C)
