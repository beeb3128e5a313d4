import networkx as nx
import pytest

from elimdist.boundaried import RepresentativeRegistry
from elimdist.graph import Graph

# acceptance outcomes, printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def from_nx(g) -> Graph:
    return Graph(g.nodes, g.edges)


def connected_atlas(n_max: int) -> list[Graph]:
    """Connected graphs up to n_max vertices (n_max <= 7), one per class, from networkx's atlas."""
    return [
        from_nx(g)
        for g in nx.graph_atlas_g()
        if 0 < g.number_of_nodes() <= n_max and nx.is_connected(g)
    ]


@pytest.fixture(scope="session")
def atlas7() -> list[Graph]:
    return connected_atlas(7)


@pytest.fixture(scope="session")
def atlas5() -> list[Graph]:
    return connected_atlas(5)


@pytest.fixture(scope="session")
def registry() -> RepresentativeRegistry:
    return RepresentativeRegistry()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
