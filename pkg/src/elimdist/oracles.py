"""Brute-force ground truth, written to be obviously correct rather than fast."""

from __future__ import annotations

import threading
from collections.abc import Callable
from itertools import product

from elimdist.annotated import AnnotatedTree
from elimdist.boundaried import BoundariedGraph
from elimdist.canon import canonical_form
from elimdist.forest import EliminationForest
from elimdist.graph import Graph, complete_graph
from elimdist.minors import ObstructionFamily, ResourceLimitExceeded, in_exc
from elimdist.treedecomp import Violation

ED_CAP = 10
CHARSTAR_CAP = 6
MINOR_CAP_G = 8
MINOR_CAP_H = 5

_ed_memo: dict[tuple[bytes, bytes], int] = {}
_ed_lock = threading.Lock()


def ed_oracle(
    g: Graph,
    f: ObstructionFamily,
    cap: int = ED_CAP,
    member: Callable[[Graph, ObstructionFamily], bool] = in_exc,
) -> int:
    """Elimination distance to exc(f) straight from the recursive definition."""
    if g.n > cap:
        raise ResourceLimitExceeded(f"ed_oracle cap is {cap} vertices, got {g.n}")
    return _ed(g, f, member)


def _ed(g: Graph, f: ObstructionFamily, member) -> int:
    key = (f.fingerprint, canonical_form(g))
    hit = _ed_memo.get(key)
    if hit is not None:
        return hit
    if member(g, f):
        val = 0
    else:
        comps = g.component_sets()
        if len(comps) > 1:
            val = max(_ed(g.subgraph(c), f, member) for c in comps)
        else:
            val = 1 + min(_ed(g.delete_vertices([v]), f, member) for v in g.vertices)
    with _ed_lock:
        _ed_memo[key] = val
    return val


def annotated_ed_oracle(
    g: Graph, s0, f: ObstructionFamily, cap: int = ED_CAP
) -> int:
    """Like ed_oracle, but every vertex of s0 has to be eliminated (made internal)."""
    if g.n > cap:
        raise ResourceLimitExceeded(f"annotated_ed_oracle cap is {cap} vertices, got {g.n}")
    memo: dict[tuple[frozenset[int], frozenset[int]], int] = {}

    def rec(vs: frozenset[int]) -> int:
        s = vs & frozenset(s0)
        key = (vs, s)
        if key in memo:
            return memo[key]
        h = g.subgraph(vs)
        if not s and in_exc(h, f):
            val = 0
        else:
            comps = h.component_sets()
            if len(comps) > 1:
                val = max(rec(c) for c in comps)
            else:
                val = 1 + min(rec(vs - {v}) for v in vs)
        memo[key] = val
        return val

    return rec(g.vertex_set)


_EMPTY_CLASS = ObstructionFamily((complete_graph(1),), name="K1")


def td_oracle(g: Graph, cap: int = ED_CAP) -> int:
    """Treedepth: elimination distance to the class holding only the empty graph."""
    return ed_oracle(g, _EMPTY_CLASS, cap)


# -- minor oracle -------------------------------------------------------------


def _connected_subsets(masks: list[int]) -> list[tuple[int, int]]:
    """(subset, neighbourhood) for every non-empty connected vertex subset."""
    n = len(masks)
    out = []
    for s in range(1, 1 << n):
        start = s & -s
        comp = start
        frontier = start
        while frontier:
            nb = 0
            for v in range(n):
                if frontier >> v & 1:
                    nb |= masks[v]
            frontier = nb & s & ~comp
            comp |= frontier
        if comp == s:
            nb = 0
            for v in range(n):
                if s >> v & 1:
                    nb |= masks[v]
            out.append((s, nb & ~s))
    return out


def minor_oracle(
    h: Graph, g: Graph, cap_g: int = MINOR_CAP_G, cap_h: int = MINOR_CAP_H
) -> bool:
    """Is h a minor of g?  Searches for disjoint connected branch sets directly."""
    if g.n > cap_g or h.n > cap_h:
        raise ResourceLimitExceeded(f"minor_oracle caps are |V(g)|<={cap_g}, |V(h)|<={cap_h}")
    if h.n == 0:
        return True
    if h.n > g.n or h.m > g.m:
        return False
    _, _, gm = g.bitmasks
    subsets = _connected_subsets(list(gm))
    hv = list(h.vertices)
    hpos = {v: i for i, v in enumerate(hv)}
    earlier = [[hpos[u] for u in h.adj[v] if hpos[u] < i] for i, v in enumerate(hv)]
    branch: list[tuple[int, int]] = []

    def rec(i: int, used: int) -> bool:
        if i == len(hv):
            return True
        for s, nb in subsets:
            if s & used:
                continue
            if all(nb & branch[j][0] for j in earlier[i]):
                branch.append((s, nb))
                if rec(i + 1, used | s):
                    return True
                branch.pop()
        return False

    return rec(0, 0)


# -- forest validation ----------------------------------------------------------


def validate_forest(g: Graph, f: ObstructionFamily, ef: EliminationForest) -> Violation | None:
    """Check the five elimination-tree axioms; report the first failure."""
    nodes = set(ef.parent)
    if set(ef.chi) != nodes:
        return Violation("structure", None, "parent and chi maps disagree")
    for t, p in ef.parent.items():
        if p is not None and p not in nodes:
            return Violation("structure", t, f"node {t} has unknown parent {p}")
    for t in nodes:
        seen, x = set(), t
        while x is not None:
            if x in seen:
                return Violation("structure", t, f"node {t} lies on a cycle")
            seen.add(x)
            x = ef.parent[x]
    ch = ef.children()
    for t in sorted(nodes):
        if ch[t] and len(ef.chi[t]) != 1:
            return Violation("axiom1", t, f"internal node {t} has |chi| = {len(ef.chi[t])}")
    owner: dict[int, int] = {}
    for t in sorted(nodes):
        if not ef.chi[t] and not (f.trivial and not ch[t]):
            return Violation("axiom2", t, f"node {t} has an empty bag")
        for v in ef.chi[t]:
            if v not in g.vertex_set:
                return Violation("axiom2", v, f"vertex {v} is not in the graph")
            if v in owner:
                return Violation("axiom2", v, f"vertex {v} is in nodes {owner[v]} and {t}")
            owner[v] = t
    missing = sorted(g.vertex_set - set(owner))
    if missing:
        return Violation("axiom2", missing[0], f"vertex {missing[0]} is in no node")
    depth_anc = {t: _ancestors(ef, t) for t in nodes}
    for u, v in g.sorted_edges():
        a, b = owner[u], owner[v]
        if a not in depth_anc[b] and b not in depth_anc[a]:
            return Violation("axiom3", (u, v), f"edge {u}-{v} joins incomparable nodes {a}, {b}")
    for t in sorted(nodes):
        if not ch[t] and not in_exc(g.subgraph(ef.chi[t]), f):
            return Violation("axiom4", t, f"leaf {t} induces a graph outside exc(F)")
    for t in sorted(nodes):
        sub = g.subgraph(ef.subtree(t))
        if sub.n and not sub.is_connected():
            return Violation("axiom5", t, f"subtree of node {t} induces a disconnected graph")
    return None


def _ancestors(ef: EliminationForest, t: int) -> set[int]:
    out = set()
    x: int | None = t
    while x is not None:
        out.add(x)
        x = ef.parent[x]
    return out


# -- char* by exhaustive enumeration ----------------------------------------------


def charstar_oracle(
    bg: BoundariedGraph, f: ObstructionFamily, k: int, cap: int = CHARSTAR_CAP
) -> list[AnnotatedTree]:
    """Annotated trees read off every elimination forest of height <= k.

    Subtrees may induce disconnected graphs only when every component
    meets the boundary (such parts are completed by the rest of the
    graph after gluing).  Graphs with a boundary-free component give [].
    """
    g = bg.graph
    if g.n > cap:
        raise ResourceLimitExceeded(f"charstar_oracle cap is {cap} vertices, got {g.n}")
    xset = frozenset(bg.boundary)
    if any(not (c & xset) for c in g.component_sets()):
        return []
    memo: dict[tuple[frozenset[int], int], list] = {}

    def comps(u: frozenset[int]) -> list[frozenset[int]]:
        return g.subgraph(u).component_sets()

    def trees(u: frozenset[int], lim: int) -> list:
        key = (u, lim)
        if key in memo:
            return memo[key]
        out = []
        if in_exc(g.subgraph(u), f):
            out.append((u, ()))
        if lim > 0 and len(u) > 1:
            for v in sorted(u):
                for fo in forests(u - {v}, lim - 1):
                    out.append((frozenset([v]), fo))
        memo[key] = out
        return out

    def forests(u: frozenset[int], lim: int) -> list[tuple]:
        cs = comps(u)
        out = []
        for groups in _set_partitions(cs):
            options = []
            for grp in groups:
                if len(grp) > 1 and not all(c & xset for c in grp):
                    break
                options.append(trees(frozenset().union(*grp), lim))
            else:
                out.extend(product(*options))
        return out

    result = []
    for fo in forests(g.vertex_set, k):
        result.append(_annotate(bg, fo))
    return result


def _set_partitions(items: list) -> list[list[list]]:
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for p in _set_partitions(rest):
        out.append([[first]] + p)
        for i in range(len(p)):
            out.append(p[:i] + [[first] + p[i]] + p[i + 1 :])
    return out


def _annotate(bg: BoundariedGraph, fo: tuple) -> AnnotatedTree:
    g = bg.graph
    lab = {v: i for i, v in enumerate(bg.boundary)}
    t = bg.t
    parent: list[int] = []
    chi: list[frozenset[int]] = []
    hts: list[int] = []

    def flat(node, par: int) -> tuple[int, frozenset[int]]:
        idx = len(parent)
        parent.append(par)
        chi.append(node[0])
        hts.append(0)
        sub = set(node[0])
        hh = 0
        for c in node[1]:
            ch_h, ch_sub = flat(c, idx)
            hh = max(hh, ch_h + 1)
            sub |= ch_sub
        hts[idx] = hh
        subs.append((idx, frozenset(sub)))
        return hh, frozenset(sub)

    subs: list[tuple[int, frozenset[int]]] = []
    for node in fo:
        flat(node, -1)
    f = [0] * t
    for i, v in enumerate(bg.boundary):
        f[i] = next(j for j, c in enumerate(chi) if v in c)
    links: list[tuple[int, ...]] = [()] * len(parent)
    for idx, sub in subs:
        cls = []
        for c in g.subgraph(sub).component_sets():
            m = 0
            for v in c:
                if v in lab:
                    m |= 1 << lab[v]
            if m:
                cls.append(m)
        links[idx] = tuple(sorted(cls))
    inner: list[int] = []
    for j, c in enumerate(chi):
        if any(v in lab for v in c):
            inner.extend(sorted(v for v in c if v not in lab))
    order = list(bg.boundary) + inner
    pos = {v: i for i, v in enumerate(order)}
    node_of = {v: j for j, c in enumerate(chi) for v in c}
    R = [0] * len(order)
    for u, v in g.edges:
        if u in pos and v in pos and node_of[u] == node_of[v]:
            R[pos[u]] |= 1 << pos[v]
            R[pos[v]] |= 1 << pos[u]
    return AnnotatedTree(tuple(parent), tuple(hts), tuple(f), tuple(R), tuple(links))
