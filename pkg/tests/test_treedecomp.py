import pytest
from hypothesis import given, settings

from elimdist.graph import Graph, complete_graph, cycle_graph, grid_graph, path_graph
from elimdist.treedecomp import (
    TreeDecomposition,
    decompose,
    format_td,
    make_nice,
    parse_td,
    treewidth,
    validate,
    validate_nice,
)
from elimdist.walls import elementary_wall

from strategies import graphs


@pytest.mark.parametrize(
    "g,tw",
    [
        (path_graph(5), 1),
        (cycle_graph(6), 2),
        (complete_graph(5), 4),
        (grid_graph(3, 3), 3),
        (grid_graph(4, 4), 4),
        (Graph(range(3)), 0),
    ],
)
def test_treewidth_values(g, tw):
    assert treewidth(g) == tw


def test_wall_treewidth():
    # frozen from the exact elimination-order search
    assert treewidth(elementary_wall(3).graph) == 3


@settings(max_examples=60, deadline=None)
@given(graphs(8))
def test_decompose_is_valid_and_nice(g):
    if g.n == 0:
        assert decompose(g) is None
        return
    td = decompose(g)
    assert validate(td, g) is None
    assert td.width == treewidth(g)
    nice = make_nice(td, g)
    assert validate_nice(nice, g) is None
    assert nice.width == td.width
    assert nice.bags[nice.root] == td.bags[td.root]


@settings(max_examples=30, deadline=None)
@given(graphs(7))
def test_root_bag_respected(g):
    if g.n == 0:
        return
    root = frozenset(list(g.vertices)[:2])
    td = decompose(g, root_bag=root)
    assert td.bags[td.root] == root
    assert validate(td, g) is None


def test_width_budget():
    assert decompose(complete_graph(5), width_budget=3) is None


def test_validate_reports_missing_edge():
    g = path_graph(3)
    td = TreeDecomposition.from_edges({0: [0, 1], 1: [2]}, [(0, 1)], 0)
    bad = validate(td, g)
    assert bad.kind == "edge" and bad.witness == (1, 2)


def test_validate_reports_connectivity():
    g = path_graph(3)
    td = TreeDecomposition.from_edges({0: [0, 1], 1: [1, 2], 2: [0, 2]}, [(0, 1), (1, 2)], 0)
    assert validate(td, g).kind == "connectivity"


def test_pace_round_trip():
    g = grid_graph(3, 3)
    nice = make_nice(decompose(g), g)
    text = format_td(nice, g.n)
    assert text.startswith("s td ")
    back = parse_td(text)
    assert validate_nice(back, g) is None
    assert sorted(k.value for k in back.kind.values()) == sorted(k.value for k in nice.kind.values())


def test_pace_bad_header():
    with pytest.raises(ValueError):
        parse_td("b 1 0 1\n")
