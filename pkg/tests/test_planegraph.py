from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cycolor import corpus
from cycolor.planegraph import (
    Coloring,
    GraphParseError,
    PlaneGraphError,
    brute_force_cyclic_coloring,
    build_plane_graph,
    check_cyclic_coloring,
    cyclic_adjacency,
    cyclic_chromatic_number,
    cyclic_degree,
    format_graph,
    is_three_connected,
    parse_graph,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "cycolor" / "data" / "graphs"


def test_k4_faces():
    g = corpus.k4()
    assert g.face_sizes() == [3, 3, 3, 3]
    assert g.vertex_count - g.edge_count() + len(g.faces) == 2


def test_cube_faces_euler():
    g = corpus.cube()
    assert g.face_sizes() == [4] * 6
    assert g.vertex_count - g.edge_count() + len(g.faces) == 2


def test_wheel_faces():
    g = corpus.wheel5()
    assert g.face_sizes() == [3, 3, 3, 3, 3, 5]


def test_corpus_euler_invariant():
    for name, g in corpus.all_graphs().items():
        assert g.vertex_count - g.edge_count() + len(g.faces) == 2, name


def test_asymmetric_rotation_rejected():
    with pytest.raises(PlaneGraphError, match="asymmetric"):
        build_plane_graph([[1], [0, 2], [0]])


def test_duplicate_neighbor_rejected():
    with pytest.raises(PlaneGraphError, match="duplicate"):
        build_plane_graph([[1, 1], [0, 0]])


def test_bad_rotation_order_fails_euler():
    # Valid K4 adjacency but scrambled rotation at one vertex: not planar as drawn.
    rot = [[1, 3, 2], [0, 2, 3], [1, 0, 3], [2, 1, 0]]
    with pytest.raises(PlaneGraphError, match="Euler"):
        build_plane_graph(rot)


def test_bridge_rejected_by_default():
    path3 = [[1], [0, 2], [1]]
    with pytest.raises(PlaneGraphError, match="bridge"):
        build_plane_graph(path3)
    g = build_plane_graph(path3, allow_bridges=True)
    assert g.vertex_count == 3


def test_cyclic_degree_examples():
    k4 = corpus.k4()
    assert all(cyclic_degree(k4, v) == 3 for v in k4.vertices())
    cube = corpus.cube()
    assert all(cyclic_degree(cube, v) == 6 for v in cube.vertices())
    wheel = corpus.wheel5()
    assert cyclic_degree(wheel, 0) == 5  # hub sees only the rim


def test_cyclic_degree_matches_adjacency_graph():
    for name, g in corpus.all_graphs().items():
        adj = cyclic_adjacency(g)
        for v in g.vertices():
            assert cyclic_degree(g, v) == len(adj[v]), (name, v)


def test_oracle_k4():
    k4 = corpus.k4()
    assert brute_force_cyclic_coloring(k4, 3) is None
    col = brute_force_cyclic_coloring(k4, 4)
    assert col is not None
    assert check_cyclic_coloring(k4, col)
    assert cyclic_chromatic_number(k4) == 4


def test_oracle_cube():
    cube = corpus.cube()
    col = brute_force_cyclic_coloring(cube, 6)
    assert col is not None
    assert check_cyclic_coloring(cube, col)


def test_oracle_wheel_regression():
    # The hub face forces the rim pairwise cyclically adjacent, so the
    # cyclic-adjacency graph is complete on six vertices.
    wheel = corpus.wheel5()
    assert brute_force_cyclic_coloring(wheel, 5) is None
    assert cyclic_chromatic_number(wheel) == 6


def test_check_rejects_partial_and_bad_palette():
    k4 = corpus.k4()
    with pytest.raises(PlaneGraphError, match="partial"):
        check_cyclic_coloring(k4, Coloring({0: 1, 1: 2}, 4))
    with pytest.raises(PlaneGraphError, match="palette"):
        check_cyclic_coloring(k4, Coloring({0: 5, 1: 1, 2: 2, 3: 3}, 4))


def test_check_detects_repeats():
    k4 = corpus.k4()
    assert check_cyclic_coloring(k4, Coloring({0: 1, 1: 2, 2: 3, 3: 4}, 4))
    assert not check_cyclic_coloring(k4, Coloring({0: 1, 1: 1, 2: 3, 3: 4}, 4))


@settings(deadline=None, max_examples=20)
@given(st.sampled_from(sorted(corpus.BUILDERS)), st.integers(min_value=1, max_value=8))
def test_oracle_roundtrip_and_monotone(name, k):
    g = corpus.BUILDERS[name]()
    col = brute_force_cyclic_coloring(g, k)
    if col is not None:
        assert check_cyclic_coloring(g, col)
        again = brute_force_cyclic_coloring(g, k + 1)
        assert again is not None and check_cyclic_coloring(g, again)


def test_plummer_toft_bound_on_corpus():
    # Every corpus graph is 3-connected and admits a cyclic coloring with at
    # most (max face size) + 2 colors.
    for name, g in corpus.all_graphs().items():
        assert is_three_connected(g), name
        bound = g.max_face_size() + 2
        col = brute_force_cyclic_coloring(g, bound)
        assert col is not None, name
        assert check_cyclic_coloring(g, col)


def test_three_connectivity():
    assert is_three_connected(corpus.k4())
    assert is_three_connected(corpus.cube())
    path3 = build_plane_graph([[1], [0, 2], [1]], allow_bridges=True)
    assert not is_three_connected(path3)
    cycle4 = build_plane_graph([[1, 3], [0, 2], [1, 3], [2, 0]])
    assert not is_three_connected(cycle4)


def test_parse_format_roundtrip():
    for name, g in corpus.all_graphs().items():
        text = format_graph(g)
        h = parse_graph(text)
        assert h.rotation == g.rotation, name
        assert h.faces == g.faces, name


def test_data_files_match_builders():
    for name, g in corpus.all_graphs().items():
        text = (DATA / f"{name}.txt").read_text()
        assert parse_graph(text).rotation == g.rotation


def test_parse_reports_line_numbers():
    bad = "3\n1: 2 3\n2: 1 3\n3: 1\n"
    with pytest.raises(GraphParseError, match="line 3") as exc:
        parse_graph(bad)
    assert exc.value.line == 3
    with pytest.raises(GraphParseError, match="line 1"):
        parse_graph("zero\n")
