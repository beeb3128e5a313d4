"""Minor containment and membership in exc(F)."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import networkx as nx

from elimdist.canon import canonical_form
from elimdist.graph import (
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    path_graph,
)

DEFAULT_BUDGET = 10**7


class ResourceLimitExceeded(RuntimeError):
    """A configurable search budget or size cap was exhausted."""


@dataclass(frozen=True)
class ObstructionFamily:
    """A finite obstruction family F; exc(F) is the class of F-minor-free graphs."""

    members: tuple[Graph, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("obstruction family must be non-empty")
        if any(h.n == 0 for h in self.members):
            raise ValueError("obstructions must have at least one vertex")

    @property
    def s_F(self) -> int:
        return max(h.n for h in self.members)

    @property
    def ell_F(self) -> int:
        return max(h.detail() for h in self.members)

    @property
    def trivial(self) -> bool:
        return any(h.n < 2 for h in self.members)

    @cached_property
    def fingerprint(self) -> bytes:
        return b"+".join(sorted(canonical_form(h) for h in self.members))

    def __str__(self) -> str:
        return self.name or f"F[{len(self.members)}]"


def _k(n: int) -> Graph:
    return complete_graph(n)


PRESETS = {
    "K1": lambda: (_k(1),),
    "K2": lambda: (_k(2),),
    "K3": lambda: (_k(3),),
    "K4": lambda: (_k(4),),
    "K5": lambda: (_k(5),),
    "P3": lambda: (path_graph(3),),
    "C4": lambda: (cycle_graph(4),),
    "planar": lambda: (_k(5), complete_bipartite(3, 3)),
}


def preset(name: str) -> ObstructionFamily:
    try:
        return ObstructionFamily(PRESETS[name](), name=name)
    except KeyError:
        raise ValueError(f"unknown family preset {name!r}") from None


def family_from_spec(spec: str) -> ObstructionFamily:
    """Parse a family spec: a preset name, or comma-separated edge-list paths."""
    if spec in PRESETS:
        return preset(spec)
    from elimdist.io import read_edge_list

    paths = [p for p in spec.split(",") if p]
    if not paths or not all(Path(p).is_file() for p in paths):
        raise ValueError(f"unknown family {spec!r}")
    return ObstructionFamily(tuple(read_edge_list(p) for p in paths), name=spec)


# -- exact minor search ----------------------------------------------------


def _embeds(h: Graph, host: Graph) -> bool:
    """Is h a (not necessarily induced) subgraph of host?"""
    if h.n > host.n or h.m > host.m:
        return False
    hv = sorted(h.vertices, key=lambda v: -h.degree(v))
    # order so that each vertex (after the first of its component) has an earlier neighbour
    order: list[int] = []
    placed: set[int] = set()
    for s in hv:
        if s in placed:
            continue
        stack = [s]
        placed.add(s)
        while stack:
            x = stack.pop(0)
            order.append(x)
            for y in sorted(h.adj[x], key=lambda v: -h.degree(v)):
                if y not in placed:
                    placed.add(y)
                    stack.append(y)
    _, hidx, hmask = host.bitmasks
    hostv = host.vertices
    hdeg = [m.bit_count() for m in hmask]
    pos = {v: i for i, v in enumerate(order)}
    back = [[pos[u] for u in h.adj[v] if pos[u] < i] for i, v in enumerate(order)]
    need = [h.degree(v) for v in order]
    full = (1 << len(hostv)) - 1
    img = [0] * len(order)

    def rec(i: int, used: int) -> bool:
        if i == len(order):
            return True
        cand = full & ~used
        for j in back[i]:
            cand &= hmask[img[j]]
        while cand:
            low = cand & -cand
            c = low.bit_length() - 1
            cand ^= low
            if hdeg[c] < need[i]:
                continue
            img[i] = c
            if rec(i + 1, used | low):
                return True
        return False

    return rec(0, 0)


def _reduce_host(g: Graph, min_deg: int) -> Graph:
    """Safe reductions: drop vertices of degree < min(min_deg, 2) and dissolve
    degree-2 vertices when every pattern vertex has degree >= 3."""
    changed = True
    while changed:
        changed = False
        if min_deg >= 1:
            low = [v for v in g.vertices if g.degree(v) < min(min_deg, 2)]
            if low:
                g = g.delete_vertices(low)
                changed = True
                continue
        if min_deg >= 3:
            for v in g.vertices:
                if g.degree(v) == 2:
                    a, b = sorted(g.adj[v])
                    if g.has_edge(a, b):
                        g = g.delete_vertices([v])
                    else:
                        g = g.contract_edge(a, v)
                    changed = True
                    break
    return g


def is_minor(h: Graph, g: Graph, budget: int = DEFAULT_BUDGET) -> bool:
    """Exact test whether h is a minor of g (branching search with memo)."""
    if h.n == 0:
        return True
    if h.n > g.n or h.m > g.m:
        return False
    if _planar(g) and not _planar(h):
        return False
    if h.is_connected():
        comps = [g.subgraph(c) for c in g.component_sets()]
        comps = [c for c in comps if c.n >= h.n and c.m >= h.m]
    else:
        comps = [g]
    counter = [0]
    return any(_minor_search(h, c, budget, counter) for c in comps)


def _planar(g: Graph) -> bool:
    if g.n < 5 or g.m <= 8:
        return True
    if g.m > 3 * g.n - 6:
        return False
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices)
    nxg.add_edges_from(g.edges)
    return nx.check_planarity(nxg)[0]


def _minor_search(h: Graph, g: Graph, budget: int, counter: list[int]) -> bool:
    min_deg = min((h.degree(v) for v in h.vertices), default=0)
    seen: set[bytes] = set()
    stack = [g]
    while stack:
        cur = _reduce_host(stack.pop(), min_deg)
        if cur.n < h.n or cur.m < h.m:
            continue
        key = canonical_form(cur)
        if key in seen:
            continue
        seen.add(key)
        counter[0] += 1
        if counter[0] > budget:
            raise ResourceLimitExceeded(f"minor search exceeded {budget} nodes")
        if _embeds(h, cur):
            return True
        if cur.n == h.n:
            continue
        for v in cur.vertices:
            stack.append(cur.delete_vertices([v]))
        for u, v in cur.sorted_edges():
            stack.append(cur.contract_edge(u, v))
    return False


# -- exc(F) membership ------------------------------------------------------

_K3 = canonical_form(complete_graph(3))
_K2 = canonical_form(complete_graph(2))
_K1 = canonical_form(complete_graph(1))
_P3 = canonical_form(path_graph(3))


def _fast_minor(h_code: bytes, g: Graph) -> bool | None:
    if h_code == _K1:
        return g.n > 0
    if h_code == _K2:
        return g.m > 0
    if h_code == _K3:
        return g.m > g.n - len(g.component_sets())
    if h_code == _P3:
        return any(len(c) >= 3 for c in g.component_sets())
    return None


_exc_cache: dict[tuple[bytes, bytes], bool] = {}
_exc_lock = threading.Lock()


def in_exc(g: Graph, f: ObstructionFamily, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff no member of f is a minor of g."""
    key = (f.fingerprint, canonical_form(g))
    hit = _exc_cache.get(key)
    if hit is not None:
        return hit
    res = True
    for h in f.members:
        fast = _fast_minor(canonical_form(h), g)
        found = fast if fast is not None else is_minor(h, g, budget)
        if found:
            res = False
            break
    with _exc_lock:
        _exc_cache.setdefault(key, res)
    return res
