from fractions import Fraction as F

import pytest

from cycolor import corpus
from cycolor.charge import (
    GraphContext,
    apply_rules,
    applicable_rules,
    edge,
    face,
    initial_charge,
    vertex,
)
from cycolor.planegraph import build_plane_graph
from cycolor.rules import TriangleClass, paper_table

TABLE16 = paper_table(16)
TABLE17 = paper_table(17)

OCTAHEDRON = [[1, 3, 4, 2], [0, 2, 5, 3], [1, 0, 4, 5], [4, 0, 1, 5], [2, 0, 3, 5], [3, 1, 2, 4]]


def test_initial_charges():
    g = corpus.wheel5()
    led = initial_charge(g)
    assert led.of(vertex(1)) == -1  # rim 3-vertex
    assert led.of(vertex(0)) == 1  # hub 5-vertex
    pentagon = next(j for j, w in enumerate(g.faces) if len(set(w)) == 5)
    assert led.of(face(pentagon)) == 1
    u, v = g.edges()[0]
    assert led.of(edge(u, v)) == 0
    assert led.total() == -8


@pytest.mark.parametrize("name", sorted(corpus.BUILDERS))
@pytest.mark.parametrize("table", [TABLE16, TABLE17])
def test_conservation_on_corpus(name, table):
    g = corpus.BUILDERS[name]()
    before = initial_charge(g).total()
    assert before == -8
    led = apply_rules(g, table)
    assert led.total() == -8
    for (kind, ident), bal in led.balances.items():
        if kind == "e":
            assert bal == 0, ident


def test_k4_no_transfers():
    led = apply_rules(corpus.k4(), TABLE16)
    assert not led.log
    assert led.total() == -8


def test_cube_no_transfers():
    led = apply_rules(corpus.cube(), TABLE16)
    assert not led.log


def test_wheel_regression_values():
    # Frozen after a verified run: the pentagon collects -C_5_3 per edge and
    # the CC extra from each of the five C-triangles.
    g = corpus.wheel5()
    led = apply_rules(g, TABLE16)
    pentagon = next(j for j, w in enumerate(g.faces) if len(set(w)) == 5)
    assert led.of(face(pentagon)) == F(835, 336)
    for j, w in enumerate(g.faces):
        if len(set(w)) == 3:
            assert led.of(face(j)) == F(-2179, 1680)
    assert led.of(vertex(0)) == 1
    assert led.of(vertex(1)) == -1
    rules_fired = sorted({t.rule for t in led.log})
    assert rules_fired == ["C_5_3", "star_CC_to_5_extra"]


def test_dodecahedron_regression_values():
    # Every vertex is isolated with respect to each of its three 5-faces and
    # receives E_5_0 = 1/7 from each; frozen per-element values.
    g = corpus.dodecahedron()
    led = apply_rules(g, TABLE16)
    for v in g.vertices():
        assert led.of(vertex(v)) == F(-4, 7)
    for j in range(len(g.faces)):
        assert led.of(face(j)) == F(2, 7)
    assert len(led.log) == 60
    assert {t.rule for t in led.log} == {"E_5_0"}


def test_prism_transfers():
    g = corpus.pentagonal_prism()
    led = apply_rules(g, TABLE16)
    rules_fired = sorted({t.rule for t in led.log})
    assert rules_fired == ["D_5_3", "half_to_3vertex"]
    # each vertex sits on two 4-faces and gets half from each
    for v in g.vertices():
        assert led.of(vertex(v)) == 0


def test_rejects_overlarge_faces():
    g = corpus.dodecahedron()
    with pytest.raises(ValueError, match="face of size"):
        apply_rules(g, paper_table(4))


def test_triangle_classification_on_graphs():
    g = corpus.wheel5()
    ctx = GraphContext(g)
    pentagon = next(j for j, w in enumerate(g.faces) if len(set(w)) == 5)
    walk = ctx.walk(pentagon)
    v1, v2 = walk[0], walk[1]
    tri = ctx.other_face(v1, v2, pentagon)
    # apex is the hub (degree 5), so the triangle is a C-triangle
    assert ctx.triangle_class(tri, v1, v2) is TriangleClass.C
    assert ctx.t_of(pentagon, walk[4], walk[0]) == 1


def test_sink_of_examples():
    # Degree-4 vertex on a 3-face disjoint from the sender: that face is the
    # sink; degree-3 and degree-5 vertices are their own sinks.
    g = build_plane_graph(OCTAHEDRON)
    ctx = GraphContext(g)
    v = 0
    fan = ctx.distinct_vertex_faces(v)
    sender = fan[0]
    target = ctx.sink_of(v, sender)
    assert target[0] == "f"
    assert ctx.size(target[1]) == 3
    shared_edges = set()
    sw = ctx.walk(sender)
    for t in range(len(sw)):
        shared_edges.add(frozenset((sw[t], sw[(t + 1) % len(sw)])))
    tw = ctx.walk(target[1])
    assert all(
        frozenset((tw[t], tw[(t + 1) % len(tw)])) not in shared_edges
        for t in range(len(tw))
    )
    wheel = corpus.wheel5()
    wctx = GraphContext(wheel)
    assert wctx.sink_of(1, wctx.distinct_vertex_faces(1)[0]) == vertex(1)  # degree 3
    assert wctx.sink_of(0, wctx.distinct_vertex_faces(0)[0]) == vertex(0)  # degree 5


def test_transfer_dedup_stable():
    g = corpus.wheel5()
    first = applicable_rules(g, TABLE16)
    second = applicable_rules(g, TABLE16)
    assert [(t.rule, t.source, t.target, t.amount) for t in first] == [
        (t.rule, t.source, t.target, t.amount) for t in second
    ]
