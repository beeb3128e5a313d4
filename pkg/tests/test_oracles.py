import pytest
from hypothesis import given, settings

from elimdist.boundaried import BoundariedGraph
from elimdist.forest import EliminationForest
from elimdist.graph import (
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    grid_graph,
    path_graph,
    star_graph,
)
from elimdist.minors import ResourceLimitExceeded, is_minor, preset
from elimdist.oracles import (
    annotated_ed_oracle,
    charstar_oracle,
    ed_oracle,
    minor_oracle,
    td_oracle,
    validate_forest,
)

from strategies import graphs

FAMS = ["K2", "K3", "K4", "P3", "C4", "K1"]

# frozen from ed_oracle; columns follow FAMS
ED_TABLE = {
    "K4": (complete_graph(4), [3, 2, 1, 2, 1, 4]),
    "K5": (complete_graph(5), [4, 3, 2, 3, 2, 5]),
    "C5": (cycle_graph(5), [3, 1, 0, 2, 1, 4]),
    "C6": (cycle_graph(6), [3, 1, 0, 2, 1, 4]),
    "P7": (path_graph(7), [2, 0, 0, 2, 0, 3]),
    "star5": (star_graph(5), [1, 0, 0, 1, 0, 2]),
    "grid3": (grid_graph(3, 3), [4, 2, 1, 4, 2, 5]),
    "K33": (complete_bipartite(3, 3), [3, 2, 1, 3, 2, 4]),
}


@pytest.mark.parametrize("name", sorted(ED_TABLE))
def test_ed_table(name):
    g, expected = ED_TABLE[name]
    assert [ed_oracle(g, preset(f)) for f in FAMS] == expected


def test_td_of_paths():
    # treedepth of P_n is ceil(log2(n + 1))
    assert [td_oracle(path_graph(n)) for n in range(1, 9)] == [1, 2, 2, 3, 3, 3, 3, 4]
    assert td_oracle(Graph()) == 0


def test_caps():
    with pytest.raises(ResourceLimitExceeded):
        ed_oracle(path_graph(11), preset("K3"))
    with pytest.raises(ResourceLimitExceeded):
        minor_oracle(complete_graph(3), path_graph(9))


@settings(max_examples=60, deadline=None)
@given(graphs(6))
def test_disconnected_is_max(g):
    f = preset("K3")
    parts = [ed_oracle(g.subgraph(c), f) for c in g.component_sets()]
    assert ed_oracle(g, f) == max(parts, default=0)


def test_annotated_examples():
    k3 = preset("K3")
    assert annotated_ed_oracle(path_graph(2), [0], k3) == 1
    assert annotated_ed_oracle(path_graph(4), [], k3) == 0
    assert annotated_ed_oracle(path_graph(4), [1], k3) == 1


def test_minor_oracle_examples():
    assert minor_oracle(complete_graph(4), grid_graph(2, 4)) is False
    assert minor_oracle(complete_graph(4), grid_graph(3, 3), cap_g=9)
    assert minor_oracle(cycle_graph(4), complete_graph(4))
    assert not minor_oracle(complete_graph(3), star_graph(5))
    assert minor_oracle(Graph(), path_graph(2))


# -- validate_forest ------------------------------------------------------------


def _forest(parent, chi):
    return EliminationForest(parent, {t: frozenset(v) for t, v in chi.items()})


C4 = cycle_graph(4)
K3 = preset("K3")


def test_valid_forest():
    ef = _forest({0: None, 1: 0}, {0: [0], 1: [1, 2, 3]})
    assert validate_forest(C4, K3, ef) is None


@pytest.mark.parametrize(
    "parent,chi,kind",
    [
        ({0: None, 1: 0}, {0: [0, 1], 1: [2, 3]}, "axiom1"),
        ({0: None, 1: 0}, {0: [0], 1: [1, 2]}, "axiom2"),
        ({0: None, 1: 0}, {0: [0], 1: [0, 1, 2, 3]}, "axiom2"),
        ({0: None, 1: None}, {0: [0, 1], 1: [2, 3]}, "axiom3"),
        ({0: None}, {0: [0, 1, 2, 3]}, "axiom4"),
        ({0: None, 1: 0, 2: 0}, {0: [0], 1: [1, 3], 2: [2]}, "axiom3"),
        ({0: None, 1: 0}, {0: [0], 1: [1, 2, 3]}, None),
        ({0: 1, 1: 0}, {0: [0], 1: [1, 2, 3]}, "structure"),
    ],
)
def test_violations(parent, chi, kind):
    bad = validate_forest(C4, K3, _forest(parent, chi))
    assert (bad.kind if bad else None) == kind


def test_axiom5_disconnected_subtree():
    # P3 rooted at an end: the end's subtree is connected, the middle leaf set is not
    g = path_graph(3)
    ef = _forest({0: None, 1: 0}, {0: [1], 1: [0, 2]})
    bad = validate_forest(g, K3, ef)
    assert bad.kind == "axiom5"


def test_charstar_disconnected_without_boundary():
    g = Graph(range(3), [(0, 1)])
    assert charstar_oracle(BoundariedGraph(g, (0,)), K3, 3) == []


@settings(max_examples=40, deadline=None)
@given(graphs(6, 1))
def test_clique_minor_bound(g):
    # a graph with ed <= k excludes K_{s_F + k}
    f = preset("K3")
    k = ed_oracle(g, f)
    if f.s_F + k <= g.n:
        assert not is_minor(complete_graph(f.s_F + k), g)
