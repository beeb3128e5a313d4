"""Simple undirected graphs with stable vertex ids.

Graphs are immutable values.  Vertex ids are non-negative integers; the
hot paths (canonical labeling, minor search) work on a dense bitmask view
built on demand by :meth:`Graph.bitmasks`.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from functools import cached_property
from itertools import combinations

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class GraphError(ValueError):
    """Raised on malformed graph operations (unknown vertex, missing edge, ...)."""


class Graph:
    """Simple undirected graph.

    >>> g = Graph.from_edges([(0, 1), (1, 2)])
    >>> g.n, g.m
    (3, 2)
    """

    __slots__ = ("_vertices", "_edges", "__dict__")

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[Edge] = ()):
        vs = set(vertices)
        es = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            vs.add(u)
            vs.add(v)
            es.add(_norm(u, v))
        self._vertices: tuple[int, ...] = tuple(sorted(vs))
        self._edges: frozenset[Edge] = frozenset(es)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], n: int | None = None) -> Graph:
        return cls(range(n) if n is not None else (), edges)

    # -- basic accessors -------------------------------------------------

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    @cached_property
    def adj(self) -> dict[int, frozenset[int]]:
        nb: dict[int, set[int]] = {v: set() for v in self._vertices}
        for u, v in self._edges:
            nb[u].add(v)
            nb[v].add(u)
        return {v: frozenset(s) for v, s in nb.items()}

    @cached_property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self._vertices)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self._edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self._edges)

    def detail(self) -> int:
        return max(self.n, self.m)

    def __contains__(self, v: object) -> bool:
        return v in self.vertex_set

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.sorted_edges()})"

    @cached_property
    def bitmasks(self) -> tuple[tuple[int, ...], dict[int, int], list[int]]:
        """Dense view: (vertex order, id -> index, adjacency bitmasks)."""
        order = self._vertices
        index = {v: i for i, v in enumerate(order)}
        masks = [0] * len(order)
        for u, v in self._edges:
            iu, iv = index[u], index[v]
            masks[iu] |= 1 << iv
            masks[iv] |= 1 << iu
        return order, index, masks

    # -- derived graphs --------------------------------------------------

    def subgraph(self, keep: Iterable[int]) -> Graph:
        ks = set(keep)
        unknown = ks - self.vertex_set
        if unknown:
            raise GraphError(f"unknown vertices {sorted(unknown)}")
        return Graph(ks, ((u, v) for u, v in self._edges if u in ks and v in ks))

    def delete_vertices(self, s: Iterable[int]) -> Graph:
        ss = set(s)
        unknown = ss - self.vertex_set
        if unknown:
            raise GraphError(f"unknown vertices {sorted(unknown)}")
        return self.subgraph(self.vertex_set - ss)

    def delete_edge(self, u: int, v: int) -> Graph:
        e = _norm(u, v)
        if e not in self._edges:
            raise GraphError(f"edge {e} not present")
        return Graph(self._vertices, self._edges - {e})

    def add_edges(self, edges: Iterable[Edge]) -> Graph:
        return Graph(self._vertices, self._edges | {_norm(u, v) for u, v in edges})

    def add_vertex(self, v: int, neighbors: Iterable[int] = ()) -> Graph:
        if v in self.vertex_set:
            raise GraphError(f"vertex {v} already present")
        return Graph(self._vertices + (v,), set(self._edges) | {_norm(v, u) for u in neighbors})

    def contract_edge(self, u: int, v: int) -> Graph:
        """Contract edge uv; the merged vertex keeps the id ``u``."""
        if not self.has_edge(u, v):
            raise GraphError(f"edge {_norm(u, v)} not present")
        nbrs = (self.adj[u] | self.adj[v]) - {u, v}
        rest = [e for e in self._edges if u not in e and v not in e]
        g = Graph((x for x in self._vertices if x != v), rest + [(u, w) for w in nbrs])
        assert all(a != b for a, b in g.edges)
        return g

    def relabel(self, mapping: Mapping[int, int]) -> Graph:
        """Rename vertices; ids missing from ``mapping`` are kept."""
        f = lambda x: mapping.get(x, x)  # noqa: E731
        vs = [f(x) for x in self._vertices]
        if len(set(vs)) != len(vs):
            raise GraphError("relabeling is not injective")
        return Graph(vs, ((f(a), f(b)) for a, b in self._edges))

    def compact(self) -> Graph:
        """Relabel to 0..n-1 preserving vertex order."""
        return self.relabel({v: i for i, v in enumerate(self._vertices)})

    def disjoint_union(self, other: Graph) -> Graph:
        shift = (max(self._vertices) + 1) if self._vertices else 0
        o = other.relabel({v: v + shift for v in other.vertices})
        return Graph(self._vertices + o.vertices, self._edges | o.edges)

    # -- structure ------------------------------------------------------

    def component_sets(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        out = []
        for s in self._vertices:
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.component_sets()) == 1


def connected_components(g: Graph) -> list[Graph]:
    """Components of ``g``, ordered by their smallest vertex id."""
    return [g.subgraph(c) for c in g.component_sets()]


def contract_edge(g: Graph, e: Edge) -> Graph:
    return g.contract_edge(*e)


def delete_vertices(g: Graph, s: Iterable[int]) -> Graph:
    return g.delete_vertices(s)


# -- named graphs -------------------------------------------------------


def empty_graph(n: int = 0) -> Graph:
    return Graph(range(n))


def complete_graph(n: int) -> Graph:
    return Graph(range(n), combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    """Path on ``n`` vertices."""
    return Graph(range(n), ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycles need at least 3 vertices")
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph(range(leaves + 1), ((0, i) for i in range(1, leaves + 1)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(range(a + b), ((i, a + j) for i in range(a) for j in range(b)))


def grid_graph(rows: int, cols: int) -> Graph:
    """rows x cols grid; vertex (i, j) has id i*cols + j."""
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return Graph(range(rows * cols), edges)
