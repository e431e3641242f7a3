import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import P
from oracles import tent_preimages, tent_value
from graphdyn.errors import ValidationError
from graphdyn.plmap import (
    BUILTINS,
    MapSpec,
    Piece,
    PLGraphMap,
    builtin,
    cantor_bumps,
    cantor_levels,
    evaluate,
    image_of_arcs,
    iterate,
    load_map,
    map_hash,
    preimages,
    preimages_with_arcs,
)
from graphdyn.topograph import Arc, GraphPoint, interval_graph, star_graph

ALL = ["tent", "doubling_circle", "star3_mix", "figure2", "cantor_bumps:1", "cantor_bumps:3"]


def test_tent_evaluate(tent):
    assert evaluate(tent, P("1/3")) == P("2/3")
    assert evaluate(tent, P("1/2")) == P(1)
    assert evaluate(tent, P("2/3")) == P("2/3")


def test_tent_preimages(tent):
    assert preimages(tent, P("1/2")) == (P("1/4"), P("3/4"))
    assert preimages(tent, P(0)) == (P(0), P(1))
    assert preimages(tent, P("2/3")) == (P("1/3"), P("2/3"))


def test_tent_iterate(tent):
    assert iterate(tent, P("2/5"), 2) == [P("2/5"), P("4/5"), P("2/5")]
    assert iterate(tent, P("2/3"), 3) == [P("2/3")] * 4
    assert iterate(tent, P(0), 1) == [P(0), P(0)]


def test_tent_image_of_arcs(tent):
    assert image_of_arcs(tent, [Arc("e0", 0, Fraction(1, 2))]) == [Arc("e0", 0, 1)]
    assert image_of_arcs(tent, [Arc("e0", Fraction(1, 4), Fraction(3, 4))]) == [Arc("e0", Fraction(1, 2), 1)]
    third = Fraction(1, 3)
    assert image_of_arcs(tent, [Arc("e0", third, third)]) == [Arc("e0", 2 * third, 2 * third)]


def test_figure2_values(fig2):
    assert evaluate(fig2, P("1/8")) == P("1/2")
    assert evaluate(fig2, P("7/8")) == P("1/2")
    assert evaluate(fig2, P("1/2")) == P("1/2")
    assert preimages(fig2, P("1/2")) == (P("1/8"), P("1/2"), P("7/8"))


def test_star3_mix_table():
    f = builtin("star3_mix")
    centre, leaves = GraphPoint("e0", 0), [GraphPoint(f"e{i}", 1) for i in range(3)]
    assert evaluate(f, centre) == centre
    assert evaluate(f, leaves[0]) == leaves[2]
    assert evaluate(f, leaves[2]) == leaves[1]
    assert evaluate(f, GraphPoint("e0", Fraction(1, 3))) == GraphPoint("e1", 1)


def test_cantor_bumps_structure():
    f = cantor_bumps(2)
    for c, d in cantor_levels(2)[2]:
        for t in (c, (c + d) / 2, d):
            assert evaluate(f, P(t)) == P(t)
    # the depth-1 gap (1/3, 2/3) peaks at the right end of [0, 1]
    assert evaluate(f, P("1/2")) == P(1)
    # a depth-2 gap inside [2/3, 1] peaks at 1, inside [0, 1/3] at 1/3
    assert evaluate(f, P("1/6")) == P("1/3")
    assert evaluate(f, P("5/6")) == P(1)
    for bad in (0, -1):
        with pytest.raises(ValidationError):
            cantor_bumps(bad)


def test_builtin_names():
    assert builtin("cantor_bumps:3") == builtin("cantor_bumps", 3)
    with pytest.raises(ValidationError):
        builtin("nope")
    with pytest.raises(ValidationError):
        builtin("cantor_bumps:x")
    assert set(BUILTINS) == {"tent", "doubling_circle", "star3_mix", "figure2", "cantor_bumps"}


@pytest.mark.parametrize("name", ALL)
def test_builtins_are_surjective(name):
    f = builtin(name)
    assert image_of_arcs(f, f.graph.whole()) == [Arc(e.id, 0, 1) for e in f.graph.edges]


@pytest.mark.parametrize("name", ALL)
def test_continuity_at_breakpoints(name):
    f = builtin(name)
    for e in f.graph.edges:
        pcs = f.pieces_on(e.id)
        for left, right in zip(pcs, pcs[1:]):
            a = f.graph.normalize(GraphPoint(left.target_edge, left(left.t_hi)))
            b = f.graph.normalize(GraphPoint(right.target_edge, right(right.t_lo)))
            assert a == b


def test_validation_cites_piece():
    G = interval_graph()
    with pytest.raises(ValidationError, match=r"piece on e0 \[1/2, 1/1\]"):
        PLGraphMap(G, [Piece("e0", 0, Fraction(1, 2), "e0", 2, 0), Piece("e0", Fraction(1, 2), 1, "e0", 1, 0)])
    with pytest.raises(ValidationError, match="leaves the target edge"):
        PLGraphMap(G, [Piece("e0", 0, 1, "e0", 2, 0)])
    with pytest.raises(ValidationError, match="not covered"):
        PLGraphMap(G, [Piece("e0", 0, Fraction(1, 2), "e0", 1, 0)])
    S = star_graph(2)
    with pytest.raises(ValidationError, match="vertex 'c'"):
        PLGraphMap(S, [Piece("e0", 0, 1, "e0", 1, 0), Piece("e1", 0, 1, "e0", -1, 1)])


def test_constant_piece_arc_preimages():
    G = interval_graph()
    half = Fraction(1, 2)
    f = PLGraphMap(G, [Piece("e0", 0, half, "e0", 2, 0), Piece("e0", half, 1, "e0", 0, 1)])
    pts, arcs = preimages_with_arcs(f, P(1))
    assert pts == (P(half),)
    assert arcs == [Arc("e0", half, 1)]


@pytest.mark.parametrize("name", ALL)
def test_spec_round_trip(name, tmp_path):
    f = builtin(name)
    text = f.to_spec().to_json()
    g = MapSpec.from_json(text).build()
    assert g == f and g.name == f.name
    assert MapSpec.from_json(g.to_spec().to_json()).to_json() == text
    path = tmp_path / "m.json"
    path.write_text(text)
    assert load_map(path) == f
    assert map_hash(load_map(path)) == map_hash(f)


def test_spec_rejects_bad_rational():
    doc = builtin("tent").to_spec().to_dict()
    doc["map"]["pieces"][1]["a"] = "1/0"
    with pytest.raises(ValidationError, match="piece #1"):
        MapSpec.from_dict(doc)
    doc = builtin("tent").to_spec().to_dict()
    del doc["map"]["pieces"][0]["b"]
    with pytest.raises(ValidationError, match="piece #0"):
        MapSpec.from_dict(doc)
    with pytest.raises(ValidationError):
        MapSpec.from_json("{not json")


def test_edge_swap_file():
    import pathlib
    path = pathlib.Path(__file__).parents[1] / "demos" / "data" / "edge_swap.json"
    f = load_map(path)
    assert evaluate(f, GraphPoint("e0", Fraction(1, 4))) == GraphPoint("e1", Fraction(3, 4))
    assert json.loads(path.read_text())["name"] == "edge_swap"


# -- properties -------------------------------------------------------------

rat = st.fractions(min_value=0, max_value=1, max_denominator=1000)


@given(rat)
def test_tent_against_closed_form(x):
    t = builtin("tent")
    assert evaluate(t, P(x)) == P(tent_value(x))
    assert [p.t for p in preimages(t, P(x))] == tent_preimages(x)


@given(st.sampled_from(ALL), st.data())
def test_preimages_round_trip(name, data):
    f = builtin(name)
    e = data.draw(st.sampled_from([e.id for e in f.graph.edges]))
    y = GraphPoint(e, data.draw(rat))
    for q in preimages(f, y):
        assert evaluate(f, q) == f.graph.normalize(y)
    x = GraphPoint(e, data.draw(rat))
    assert f.graph.normalize(x) in preimages(f, evaluate(f, x))


grid = [Fraction(k, 97) for k in range(98)]


def test_figure2_left_preimages_stay_outside(fig2):
    for y in grid:
        ts = [p.t for p in preimages(fig2, P(y))]
        if y < Fraction(1, 2):
            assert all(t < Fraction(1, 8) or t > Fraction(7, 8) for t in ts)
        elif y > Fraction(1, 2):
            assert any(Fraction(1, 2) < t <= Fraction(3, 4) for t in ts)
