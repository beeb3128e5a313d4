"""Dynamic programming over nice tree decompositions for elimination distance.

Each decomposition node x gets the characteristic of the graph G_x induced
by the vertices of its subtree, with the bag as boundary; labels at x are
the bag vertices in ascending order.  The forget, introduce and join
procedures map characteristics of children to the parent.
"""

from __future__ import annotations

import threading
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

from elimdist.annotated import (
    AnnotatedTree,
    Characteristic,
    _bits,
    crop,
    permute,
    rep_op,
    trivial,
)
from elimdist.boundaried import BoundariedGraph, RepresentativeRegistry, glue_dense
from elimdist.canon import canonical_form
from elimdist.forest import EliminationForest
from elimdist.graph import Graph
from elimdist.minors import ObstructionFamily, in_exc
from elimdist.treedecomp import Kind, NiceTreeDecomposition, decompose, make_nice


class Infeasible(ValueError):
    """The elimination distance exceeds the requested bound."""


@dataclass
class DpContext:
    graph: Graph
    family: ObstructionFamily
    k: int
    nice: NiceTreeDecomposition
    registry: RepresentativeRegistry = field(default_factory=RepresentativeRegistry)
    threads: int = 1
    # (node, kind, bag size, entries) per processed node, when set
    trace: list[tuple[int, str, int, int]] | None = None

    def order(self, node: int) -> list[int]:
        """Bag vertices of ``node`` in label order."""
        return sorted(self.nice.bags[node])


def _merge_into(classes: Iterable[int], nbrs: int, wbit: int) -> tuple[int, ...]:
    """Add label wbit to a partition, merged with every class meeting nbrs."""
    merged = wbit
    rest = []
    for c in classes:
        if c & nbrs:
            merged |= c
        else:
            rest.append(c)
    rest.append(merged)
    return tuple(sorted(rest))


def _union_classes(classes: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for c in classes:
        keep = []
        for d in out:
            if d & c:
                c |= d
            else:
                keep.append(d)
        keep.append(c)
        out = keep
    return tuple(sorted(out))


def _finish(
    trees: Iterable[AnnotatedTree], t: int, ctx: DpContext, crop_first: bool
) -> Characteristic:
    out = Characteristic(t, ctx.k)
    seen: set[tuple] = set()
    for tr in trees:
        if crop_first:
            tr = crop(tr)
        if tr.height > ctx.k:
            continue
        raw = (tr.parent, tr.h, tr.f, tr.R, tr.links)
        if raw in seen:
            continue
        seen.add(raw)
        r = rep_op(tr, ctx.family, ctx.registry)
        if r is not None:
            out.add(r)
    return out


# -- forget -------------------------------------------------------------------------


def _forget_one(tr: AnnotatedTree) -> AnnotatedTree | None:
    t = tr.t
    if t < 2:
        raise ValueError("cannot forget the last boundary vertex")
    wbit = 1 << (t - 1)
    links = list(tr.links)
    for x in tr.ancestors(tr.f[t - 1]):
        cls = links[x]
        mine = next(c for c in cls if c & wbit)
        below = 0
        for c in cls:
            below |= c
        if mine == wbit and below != wbit:
            return None
        links[x] = tuple(sorted(c & ~wbit for c in cls if c & ~wbit))
    return AnnotatedTree(tr.parent, tr.h, tr.f[:-1], tr.R, tuple(links))


def forget_proc(c: Characteristic, ctx: DpContext) -> Characteristic:
    """Forget the vertex carrying the largest label."""
    if c.t < 2:
        raise ValueError("cannot forget the last boundary vertex")
    out = (_forget_one(tr) for tr in c)
    return _finish((tr for tr in out if tr is not None), c.t - 1, ctx, crop_first=True)


# -- introduce ----------------------------------------------------------------------


def _subtree_nodes(tr: AnnotatedTree, v: int) -> set[int]:
    out, stack = set(), [v]
    ch = tr.children
    while stack:
        x = stack.pop()
        out.add(x)
        stack.extend(ch[x])
    return out


def _nodes_of(tr: AnnotatedTree, labels: int) -> set[int]:
    return {tr.f[i] for i in _bits(labels)}


def diamond_intr(
    parent: tuple[int, ...], f: tuple[int, ...], i_labels: Iterable[int], strict: bool = False
) -> list[tuple[tuple[int, ...], int]]:
    """Placements of one new node u comparable with every node of f(I).

    Returns ``(parent', u)`` pairs; u is the new root above a set of roots or
    a new child of some node p adopting a set of p's children.  With
    ``strict`` only placements where u has a node of f(I) below it, or is a
    leaf whose parent lies in f(I), are kept.
    """
    n = len(parent)
    ch: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent):
        if p >= 0:
            ch[p].append(v)
    fi = {f[i - 1] for i in i_labels}

    def sub(v: int) -> set[int]:
        out, stack = set(), [v]
        while stack:
            x = stack.pop()
            out.add(x)
            stack.extend(ch[x])
        return out

    def anc(v: int) -> set[int]:
        out = set()
        while v >= 0:
            out.add(v)
            v = parent[v]
        return out

    out = []
    slots = [(-1, [v for v in range(n) if parent[v] < 0], set())]
    slots += [(p, ch[p], anc(p)) for p in range(n)]
    u = n
    for p, kids, above in slots:
        rest = fi - above
        subs = {c: sub(c) for c in kids}
        need = [c for c in kids if subs[c] & rest]
        if rest - set().union(*(subs[c] for c in need)):
            continue
        free = [c for c in kids if c not in need]
        for r in range(len(free) + 1):
            for extra in combinations(free, r):
                adopt = set(need) | set(extra)
                if strict:
                    below = set().union(*(subs[c] for c in adopt))
                    if not (below & fi) and not (not adopt and p in fi):
                        continue
                np_ = list(parent) + [p]
                for c in adopt:
                    np_[c] = u
                out.append((tuple(np_), u))
    return out


def _insert_label(R: tuple[int, ...], t: int, nbrs: int) -> tuple[int, ...]:
    """Add a boundary vertex at index t adjacent to the vertices in nbrs."""
    low = (1 << t) - 1
    out = []
    for i, m in enumerate(R):
        m = (m & low) | ((m >> t) << (t + 1))
        if nbrs >> i & 1:
            m |= 1 << t
        out.append(m)
    new = 0
    for i in _bits(nbrs):
        new |= 1 << (i if i < t else i + 1)
    return tuple(out[:t]) + (new,) + tuple(out[t:])


def _introduce_one(tr: AnnotatedTree, nbrs: int) -> list[AnnotatedTree]:
    t = tr.t
    wbit = 1 << t
    fi = _nodes_of(tr, nbrs)
    out: list[AnnotatedTree] = []
    # (a) the new vertex joins the leaf bag of a height-0 node
    for leaf in range(tr.size):
        if tr.h[leaf] != 0:
            continue
        path = tr.ancestors(leaf)
        if not fi <= set(path):
            continue
        R = _insert_label(tr.R, t, nbrs & tr.labels_at[leaf])
        links = list(tr.links)
        for x in path:
            links[x] = _merge_into(links[x], nbrs, wbit)
        out.append(AnnotatedTree(tr.parent, tr.h, tr.f + (leaf,), R, tuple(links)))
    # (b) the new vertex gets a node of its own
    R = _insert_label(tr.R, t, 0)
    for parent, u in diamond_intr(tr.parent, tr.f, [i + 1 for i in _bits(nbrs)]):
        p = parent[u]
        if p >= 0 and tr.h[p] == 0 and not tr.is_single(p):
            continue
        kids = [c for c in range(tr.size) if parent[c] == u]
        h = list(tr.h) + [1 + max(tr.h[c] for c in kids) if kids else 0]
        cur, x = u, p
        while x >= 0 and h[x] < h[cur] + 1:
            h[x] = h[cur] + 1
            cur, x = x, parent[x]
        links = list(tr.links)
        lu = [cl for c in kids for cl in tr.links[c]]
        links.append(_merge_into(lu, nbrs, wbit))
        x = p
        while x >= 0:
            links[x] = _merge_into(links[x], nbrs, wbit)
            x = parent[x]
        out.append(AnnotatedTree(parent, tuple(h), tr.f + (u,), R, tuple(links)))
    return out


def introduce_proc(c: Characteristic, i_labels: Iterable[int], ctx: DpContext) -> Characteristic:
    """Introduce a vertex with label t+1 adjacent to the labels in i_labels."""
    nbrs = 0
    for i in i_labels:
        if not 1 <= i <= c.t:
            raise ValueError(f"label {i} is not in 1..{c.t}")
        nbrs |= 1 << (i - 1)
    out = (r for tr in c for r in _introduce_one(tr, nbrs))
    return _finish(out, c.t + 1, ctx, crop_first=False)


# -- join ---------------------------------------------------------------------------


def _join_key(tr: AnnotatedTree) -> tuple:
    shared = sorted((tr.labels_at[v], tr.below(v)) for v in set(tr.f))
    return tuple(shared)


def _depth(tr: AnnotatedTree, v: int) -> int:
    return len(tr.ancestors(v))


def _interleavings(a: list, b: list) -> list[list]:
    if not a:
        return [list(b)]
    if not b:
        return [list(a)]
    return [[a[0]] + r for r in _interleavings(a[1:], b)] + [
        [b[0]] + r for r in _interleavings(a, b[1:])
    ]


def diamond_join(t1: AnnotatedTree, t2: AnnotatedTree) -> list[dict]:
    """All merges of two trees that agree on the labeled nodes.

    Nodes are named ``("s", labelmask)`` when labeled (shared) and
    ``(1, v)`` or ``(2, v)`` otherwise; each merge maps node to parent.
    Every merge keeps both ancestor relations.
    """
    if _join_key(t1) != _join_key(t2):
        raise ValueError("the two trees place the labels differently")
    groups: dict[int, list] = {}
    for side, tr in ((1, t1), (2, t2)):
        for v in range(tr.size):
            d = tr.below(v)
            g = groups.setdefault(d, [[], [], None])
            if tr.labels_at[v]:
                g[2] = ("s", tr.labels_at[v])
            else:
                g[side - 1].append((_depth(tr, v), (side, v)))
    ds = sorted(groups, key=lambda d: (d.bit_count(), d))
    for i, a in enumerate(ds):
        for b in ds[i + 1 :]:
            if a & b and a & b != a:
                return []
    up: dict[int, int | None] = {}
    for i, d in enumerate(ds):
        up[d] = next((e for e in ds[i + 1 :] if e & d == d), None)
    per_group = []
    for d in ds:
        a, b, s = groups[d]
        seqs = _interleavings([x for _, x in sorted(a)], [x for _, x in sorted(b)])
        per_group.append([seq + ([s] if s else []) for seq in seqs])
    out = []
    for choice in product(*per_group):
        chain = dict(zip(ds, choice))
        par: dict = {}
        for d, seq in chain.items():
            for x, y in zip(seq, seq[1:]):
                par[y] = x
            par[seq[0]] = chain[up[d]][-1] if up[d] is not None else None
        out.append(par)
    return out


def join_count(t1: AnnotatedTree, t2: AnnotatedTree) -> int:
    """Number of merges diamond_join would produce (before the laminarity test)."""
    total = 1
    cnt: dict[int, list[int]] = {}
    for side, tr in ((0, t1), (1, t2)):
        for v in range(tr.size):
            if not tr.labels_at[v]:
                cnt.setdefault(tr.below(v), [0, 0])[side] += 1
    for a, b in cnt.values():
        total *= comb(a + b, a)
    return total


def _join_pair(t1: AnnotatedTree, t2: AnnotatedTree, ctx: DpContext) -> list[AnnotatedTree]:
    t = t1.t
    lab1 = {t1.labels_at[v]: v for v in set(t1.f)}
    lab2 = {t2.labels_at[v]: v for v in set(t2.f)}
    for m, v1 in lab1.items():
        v2 = lab2[m]
        if (t1.h[v1] > 0 and not t2.is_single(v2)) or (t2.h[v2] > 0 and not t1.is_single(v1)):
            return []
    R = glue_dense(t, t1.R, t2.R)
    out = []
    for par in diamond_join(t1, t2):
        nodes = sorted(par, key=lambda x: (x[0] != "s", str(x[0]), x[1]))
        idx = {x: i for i, x in enumerate(nodes)}
        parent = tuple(idx[par[x]] if par[x] is not None else -1 for x in nodes)
        kids: list[list[int]] = [[] for _ in nodes]
        for i, p in enumerate(parent):
            if p >= 0:
                kids[p].append(i)
        order: list[int] = []
        stack = [i for i, p in enumerate(parent) if p < 0]
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(kids[x])
        h = [0] * len(nodes)
        tops1: list[list] = [[] for _ in nodes]
        tops2: list[list] = [[] for _ in nodes]
        links: list[tuple[int, ...]] = [()] * len(nodes)
        for i in reversed(order):
            x = nodes[i]
            if x[0] == "s":
                own = max(t1.h[lab1[x[1]]], t2.h[lab2[x[1]]])
                tops1[i] = [lab1[x[1]]]
                tops2[i] = [lab2[x[1]]]
            elif x[0] == 1:
                own = t1.h[x[1]]
                tops1[i] = [x[1]]
                tops2[i] = [y for c in kids[i] for y in tops2[c]]
            else:
                own = t2.h[x[1]]
                tops2[i] = [x[1]]
                tops1[i] = [y for c in kids[i] for y in tops1[c]]
            h[i] = max([own] + [h[c] + 1 for c in kids[i]])
            links[i] = _union_classes(
                [cl for y in tops1[i] for cl in t1.links[y]]
                + [cl for y in tops2[i] for cl in t2.links[y]]
            )
        f = tuple(idx[("s", t1.labels_at[v])] for v in t1.f)
        out.append(AnnotatedTree(parent, tuple(h), f, R, tuple(links)))
    return out


def join_proc(c1: Characteristic, c2: Characteristic, ctx: DpContext) -> Characteristic:
    if c1.t != c2.t:
        raise ValueError("characteristics over different boundaries")
    by_key: dict[tuple, list[AnnotatedTree]] = {}
    for tr in c2:
        by_key.setdefault(_join_key(tr), []).append(tr)
    out = (r for a in c1 for b in by_key.get(_join_key(a), ()) for r in _join_pair(a, b, ctx))
    return _finish(out, c1.t, ctx, crop_first=False)


# -- Algorithm recEd ----------------------------------------------------------------


def _check_attached(g: Graph, nice: NiceTreeDecomposition) -> None:
    ch = nice.children()
    verts: dict[int, frozenset[int]] = {}
    for x in nice.postorder():
        vs = set(nice.bags[x])
        for c in ch[x]:
            vs |= verts[c]
        verts[x] = frozenset(vs)
        for comp in g.subgraph(vs).component_sets():
            if not comp & nice.bags[x]:
                raise ValueError(f"decomposition node {x} has a component off its bag")


def _step(ctx: DpContext, x: int, done: dict[int, Characteristic]) -> Characteristic:
    nice = ctx.nice
    kind = nice.kind[x]
    kids = nice.children()[x]
    if kind is Kind.LEAF:
        return Characteristic(1, ctx.k, [trivial()])
    if kind is Kind.JOIN:
        return join_proc(done[kids[0]], done[kids[1]], ctx)
    c = done[kids[0]]
    v = nice.vertex[x]
    child = ctx.order(kids[0])
    if kind is Kind.INTRODUCE:
        nb = ctx.graph.adj[v]
        labels = [i + 1 for i, u in enumerate(child) if u in nb]
        res = introduce_proc(c, labels, ctx)
        new = ctx.order(x)
        sigma = [new.index(u) + 1 for u in child + [v]]
        return _relabel(res, sigma, ctx)
    if kind is Kind.FORGET:
        rest = [u for u in child if u != v]
        pos = {u: i + 1 for i, u in enumerate(rest + [v])}
        moved = _relabel(c, [pos[u] for u in child], ctx)
        return forget_proc(moved, ctx)
    raise ValueError(f"unknown node kind {kind}")


def _relabel(c: Characteristic, sigma: list[int], ctx: DpContext) -> Characteristic:
    if sigma == sorted(sigma):
        return c
    return Characteristic(c.t, ctx.k, (permute(tr, sigma) for tr in c))


def rec_ed(ctx: DpContext, node: int | None = None) -> Characteristic:
    """Characteristic of G_node with the bag (ascending) as boundary."""
    nice = ctx.nice
    node = nice.root if node is None else node
    _check_attached(ctx.graph, nice)
    ch = nice.children()
    # restrict to the subtree of node
    sub = []
    stack = [node]
    while stack:
        x = stack.pop()
        sub.append(x)
        stack.extend(ch[x])
    pending = {x: len(ch[x]) for x in sub}
    done: dict[int, Characteristic] = {}
    ready = sorted(x for x in sub if not ch[x])
    lock = threading.Lock()
    pool = ThreadPoolExecutor(ctx.threads) if ctx.threads > 1 else None
    try:
        while ready:
            if pool is None:
                results = [_step(ctx, x, done) for x in ready]
            else:
                results = list(pool.map(lambda x: _step(ctx, x, done), ready))
            nxt = []
            for x, res in zip(ready, results):
                if ctx.trace is not None:
                    ctx.trace.append((x, nice.kind[x].name, len(nice.bags[x]), len(res)))
                if not len(res):
                    return Characteristic(len(nice.bags[node]), ctx.k)
                with lock:
                    done[x] = res
                for c in ch[x]:
                    done.pop(c, None)
                p = nice.parent[x]
                if x != node and p is not None:
                    pending[p] -= 1
                    if pending[p] == 0:
                        nxt.append(p)
            ready = sorted(nxt)
    finally:
        if pool is not None:
            pool.shutdown()
    return done[node]


def characteristic(
    bg: BoundariedGraph,
    f: ObstructionFamily,
    k: int,
    reg: RepresentativeRegistry | None = None,
) -> Characteristic:
    """char_k of a boundaried graph (labels as given by its boundary order)."""
    if bg.t == 0:
        raise ValueError("the boundary must be non-empty")
    if f.trivial:
        raise ValueError("the DP needs a non-trivial obstruction family")
    reg = RepresentativeRegistry() if reg is None else reg
    xs = frozenset(bg.boundary)
    if any(not c & xs for c in bg.graph.component_sets()):
        return Characteristic(bg.t, k)
    td = decompose(bg.graph, root_bag=xs)
    nice = make_nice(td, bg.graph)
    ctx = DpContext(bg.graph, f, k, nice, reg)
    res = rec_ed(ctx)
    rho = bg.rho
    return _relabel(res, [rho[v] for v in sorted(xs)], ctx)


# -- elimination distance -------------------------------------------------------------


_ed_cache: dict[tuple[bytes, bytes], tuple[int | None, int]] = {}
_ed_lock = threading.Lock()


def _component_ed(
    comp: Graph, f: ObstructionFamily, k_max: int, reg: RepresentativeRegistry, threads: int
) -> int | None:
    # cache entry: (value, bound searched); value None means "above bound"
    key = (f.fingerprint, canonical_form(comp))
    hit = _ed_cache.get(key)
    if hit is not None:
        val, bound = hit
        if val is not None:
            return val if val <= k_max else None
        if bound >= k_max:
            return None
        start = bound + 1
    else:
        if in_exc(comp, f):
            _store(key, 0, 0)
            return 0
        start = 1
    nice = make_nice(decompose(comp), comp)
    for k in range(start, k_max + 1):
        ctx = DpContext(comp, f, k, nice, reg, threads)
        res = rec_ed(ctx)
        if len(res):
            val = res.min_height()
            _store(key, val, k)
            return val
    _store(key, None, k_max)
    return None


def _store(key: tuple[bytes, bytes], val: int | None, bound: int) -> None:
    with _ed_lock:
        old = _ed_cache.get(key)
        if old is None or (old[0] is None and (val is not None or bound > old[1])):
            _ed_cache[key] = (val, bound)


def compute_ed(
    g: Graph,
    f: ObstructionFamily,
    k_max: int,
    *,
    registry: RepresentativeRegistry | None = None,
    threads: int = 1,
) -> int | None:
    """Elimination distance of g to exc(f), or None when it exceeds k_max."""
    if f.trivial:
        from elimdist.oracles import ed_oracle

        val = ed_oracle(g, f)
        return val if val <= k_max else None
    reg = RepresentativeRegistry() if registry is None else registry
    best = 0
    for c in g.component_sets():
        v = _component_ed(g.subgraph(c), f, k_max, reg, threads)
        if v is None:
            return None
        best = max(best, v)
    return best


def extract_forest(
    g: Graph,
    f: ObstructionFamily,
    k: int,
    *,
    registry: RepresentativeRegistry | None = None,
    threads: int = 1,
) -> EliminationForest:
    """An elimination forest of minimum height (raises Infeasible above k)."""
    reg = RepresentativeRegistry() if registry is None else registry
    memo: dict[bytes, int | None] = {}

    def ed(h: Graph, bound: int) -> int | None:
        key = canonical_form(h)
        if key not in memo:
            memo[key] = compute_ed(h, f, k, registry=reg, threads=threads)
        v = memo[key]
        return v if v is not None and v <= bound else None

    top = ed(g, k)
    if top is None:
        raise Infeasible(f"elimination distance exceeds {k}")
    parent: dict[int, int | None] = {}
    chi: dict[int, frozenset[int]] = {}

    def build(comp: frozenset[int], par: int | None) -> None:
        h = g.subgraph(comp)
        v = ed(h, k)
        node = len(parent)
        if v == 0:
            parent[node] = par
            chi[node] = comp
            return
        for y in sorted(comp, key=lambda u: (-h.degree(u), u)):
            rest = h.delete_vertices([y])
            parts = rest.component_sets()
            if all(ed(rest.subgraph(p), v - 1) is not None for p in parts):
                parent[node] = par
                chi[node] = frozenset([y])
                if f.trivial and not parts:
                    parent[node + 1] = node
                    chi[node + 1] = frozenset()
                for p in sorted(parts, key=min):
                    build(p, node)
                return
        raise AssertionError("no vertex realizes the elimination distance")

    for c in sorted(g.component_sets(), key=min):
        build(c, None)
    return EliminationForest(parent, chi)


# -- annotated elimination distance -----------------------------------------------------


def gadget(f: ObstructionFamily) -> Graph:
    """A connected graph outside exc(f) used to force a vertex to be deleted.

    A connected member of f is used when one exists (the smallest one);
    otherwise the smallest member is made connected by joining the
    smallest vertex of each component to the smallest vertex of the first.
    """
    members = sorted(f.members, key=lambda h: (h.n, h.m, canonical_form(h)))
    conn = [h for h in members if h.is_connected()]
    if conn:
        return conn[0]
    h = members[0]
    comps = sorted((sorted(c) for c in h.component_sets()), key=lambda c: c[0])
    return h.add_edges((comps[0][0], c[0]) for c in comps[1:])


def annotated_ed(
    g: Graph,
    s0: Iterable[int],
    f: ObstructionFamily,
    k: int,
    *,
    registry: RepresentativeRegistry | None = None,
    threads: int = 1,
) -> int | None:
    """Least height of an elimination forest whose internal vertices include s0."""
    s0 = sorted(set(s0))
    if not set(s0) <= g.vertex_set:
        raise ValueError("annotated vertices must belong to the graph")
    gp = glue_gadgets(g, s0, f)
    return compute_ed(gp, f, k, registry=registry, threads=threads)


def glue_gadgets(g: Graph, s0: Iterable[int], f: ObstructionFamily) -> Graph:
    hf = gadget(f)
    anchor = hf.vertices[0]
    nxt = max(g.vertices, default=-1) + 1
    edges = set(g.edges)
    verts = set(g.vertices)
    for v in sorted(s0):
        m = {anchor: v}
        for u in hf.vertices:
            if u != anchor:
                m[u] = nxt
                nxt += 1
        verts |= set(m.values())
        edges |= {(m[a], m[b]) for a, b in hf.edges}
    return Graph(verts, edges)
