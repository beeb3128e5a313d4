import pytest
from hypothesis import given

from elimdist.io import ParseError, format_edge_list, parse_edge_list, read_edge_list, write_edge_list
from elimdist.graph import Graph

from strategies import graphs


def test_parse_with_comments_and_header():
    g = parse_edge_list("# a triangle\nn 4\n0 1\n1 2  # inline\n\n2 0\n")
    assert g.n == 4 and g.m == 3


@pytest.mark.parametrize("text", ["0 1 2\n", "a b\n", "3 3\n", "n 2\nn 3\n", "n x\n"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_edge_list(text)


@given(graphs())
def test_round_trip_on_compact_ids(g):
    assert parse_edge_list(format_edge_list(g)) == g


def test_isolated_vertices_are_compacted():
    g = Graph([3, 7, 9], [(3, 9)])
    h = parse_edge_list(format_edge_list(g))
    assert (h.n, h.m) == (3, 1)
    assert h.vertices == (0, 1, 2)


def test_file_round_trip(tmp_path):
    g = Graph(range(4), [(0, 1), (2, 3)])
    p = tmp_path / "g.el"
    write_edge_list(g, p)
    assert read_edge_list(p) == g
