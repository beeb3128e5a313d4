"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from elimdist.boundaried import BoundariedGraph
from elimdist.graph import Graph


@st.composite
def graphs(draw, max_n=7, min_n=0):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph(range(n), chosen)


@st.composite
def connected_graphs(draw, max_n=7, min_n=1):
    g = draw(graphs(max_n, min_n))
    # chain the components together so the result is connected
    comps = sorted(g.component_sets(), key=min)
    extra = [(min(a), min(b)) for a, b in zip(comps, comps[1:])]
    return g.add_edges(extra)


@st.composite
def boundaried(draw, max_n=5, max_t=3, attached=False):
    g = draw(graphs(max_n, 1))
    t = draw(st.integers(1, min(max_t, g.n)))
    boundary = tuple(draw(st.permutations(list(g.vertices)))[:t])
    if attached:
        xs = set(boundary)
        extra = [(boundary[0], min(c)) for c in g.component_sets() if not c & xs]
        g = g.add_edges(extra)
    return BoundariedGraph(g, boundary)
