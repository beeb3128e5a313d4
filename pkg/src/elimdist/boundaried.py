"""Boundaried graphs, gluing, boundaried minors and representatives.

Internally a boundaried graph is kept *dense*: a tuple of adjacency
bitmasks whose first ``t`` vertices are the boundary, vertex ``i`` carrying
label ``i + 1``.  Canonical dense forms reorder only the non-boundary
vertices, so two boundaried graphs are isomorphic (labels fixed) iff their
canonical dense forms are equal.

Equivalence classes are keyed by a :class:`FolioSignature`: the boundaried
minors that keep every boundary vertex and have at most ``h`` non-boundary
vertices.  The set is stored through its maximal elements, i.e. the
quotients (contractions of boundary-preserving induced subgraphs) that are
not spanning subgraphs of another quotient of the same order; the full set
is their closure under edge deletion.
"""

from __future__ import annotations

import json
import threading
from collections.abc import Iterable
from dataclasses import dataclass
from hashlib import sha256

from elimdist.canon import canonical_masks
from elimdist.graph import Graph

Dense = tuple[int, ...]


class IncompatibleBoundaries(ValueError):
    pass


@dataclass(frozen=True)
class BoundariedGraph:
    """``graph`` with ordered ``boundary``; ``boundary[i]`` carries label ``i + 1``."""

    graph: Graph
    boundary: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.boundary)) != len(self.boundary):
            raise ValueError("boundary vertices must be distinct")
        if not set(self.boundary) <= self.graph.vertex_set:
            raise ValueError("boundary must be a subset of the vertex set")

    @property
    def t(self) -> int:
        return len(self.boundary)

    @property
    def rho(self) -> dict[int, int]:
        return {v: i + 1 for i, v in enumerate(self.boundary)}

    @classmethod
    def from_rho(cls, graph: Graph, rho: dict[int, int]) -> BoundariedGraph:
        t = len(rho)
        if sorted(rho.values()) != list(range(1, t + 1)):
            raise ValueError("rho must be a bijection onto 1..t")
        inv = {lab: v for v, lab in rho.items()}
        return cls(graph, tuple(inv[i] for i in range(1, t + 1)))

    def boundary_graph(self) -> Graph:
        return self.graph.subgraph(self.boundary)

    def dense(self) -> Dense:
        order = list(self.boundary) + [v for v in self.graph.vertices if v not in set(self.boundary)]
        return _dense_from(self.graph, order)

    @classmethod
    def from_dense(cls, t: int, masks: Dense) -> BoundariedGraph:
        return cls(_graph_of(masks), tuple(range(t)))

    def code(self) -> bytes:
        return dense_code(self.t, self.dense())

    def canonical(self) -> BoundariedGraph:
        return BoundariedGraph.from_dense(self.t, canonical_dense(self.t, self.dense())[1])


def unit() -> BoundariedGraph:
    """The one-vertex graph whose vertex is the boundary (label 1)."""
    return BoundariedGraph(Graph([0]), (0,))


# -- dense helpers ----------------------------------------------------------


def _dense_from(g: Graph, order: list[int]) -> Dense:
    idx = {v: i for i, v in enumerate(order)}
    masks = [0] * len(order)
    for u, v in g.edges:
        masks[idx[u]] |= 1 << idx[v]
        masks[idx[v]] |= 1 << idx[u]
    return tuple(masks)


def _graph_of(masks: Dense) -> Graph:
    return Graph(
        range(len(masks)),
        ((i, j) for i, m in enumerate(masks) for j in range(i + 1, len(masks)) if m >> j & 1),
    )


def dense_edges(masks: Dense) -> int:
    return sum(m.bit_count() for m in masks) // 2


def _colors(t: int, n: int) -> list[int]:
    return list(range(1, t + 1)) + [0] * (n - t)


_canon_cache: dict[tuple[int, Dense], tuple[bytes, Dense]] = {}
_CANON_CACHE_MAX = 1 << 20


def canonical_dense(t: int, masks: Dense) -> tuple[bytes, Dense]:
    key = (t, masks)
    hit = _canon_cache.get(key)
    if hit is not None:
        return hit
    code, perm = canonical_masks(list(masks), _colors(t, len(masks)))
    nb = [v for v in perm if v >= t]
    order = list(range(t)) + nb
    out = (code, permute_dense(masks, order))
    if len(_canon_cache) >= _CANON_CACHE_MAX:
        _canon_cache.clear()
    _canon_cache[key] = out
    return out


def dense_code(t: int, masks: Dense) -> bytes:
    return canonical_dense(t, masks)[0]


def permute_dense(masks: Dense, order: list[int]) -> Dense:
    """Reindex so that old vertex ``order[i]`` becomes vertex ``i``."""
    pos = {v: i for i, v in enumerate(order)}
    out = []
    for v in order:
        m = masks[v]
        r = 0
        while m:
            low = m & -m
            r |= 1 << pos[low.bit_length() - 1]
            m ^= low
        out.append(r)
    return tuple(out)


def _drop_index(m: int, v: int) -> int:
    low = m & ((1 << v) - 1)
    return low | ((m >> (v + 1)) << v)


def delete_vertex(masks: Dense, v: int) -> Dense:
    return tuple(_drop_index(m, v) for i, m in enumerate(masks) if i != v)


def contract(masks: Dense, u: int, v: int) -> Dense:
    """Merge v into u (u survives)."""
    ms = list(masks)
    merged = (ms[u] | ms[v]) & ~(1 << u) & ~(1 << v)
    ms[u] = merged
    for w in range(len(ms)):
        if w != u and w != v:
            if merged >> w & 1:
                ms[w] |= 1 << u
            ms[w] &= ~(1 << v)
    return delete_vertex(tuple(ms), v)


def delete_edge(masks: Dense, u: int, v: int) -> Dense:
    ms = list(masks)
    ms[u] &= ~(1 << v)
    ms[v] &= ~(1 << u)
    return tuple(ms)


def glue_dense(t: int, a: Dense, b: Dense) -> Dense:
    """Identify the boundaries of a and b (union of boundary edges)."""
    na = len(a)
    nb = len(b) - t
    ms = list(a) + [0] * nb
    for i, m in enumerate(b):
        tgt = i if i < t else na + i - t
        r = 0
        x = m
        while x:
            low = x & -x
            j = low.bit_length() - 1
            r |= 1 << (j if j < t else na + j - t)
            x ^= low
        ms[tgt] |= r
    return tuple(ms)


def dense_components(masks: Dense) -> list[int]:
    """Vertex bitmasks of the connected components."""
    n = len(masks)
    seen = 0
    out = []
    for s in range(n):
        if seen >> s & 1:
            continue
        comp = 1 << s
        frontier = comp
        while frontier:
            nb = 0
            x = frontier
            while x:
                low = x & -x
                nb |= masks[low.bit_length() - 1]
                x ^= low
            frontier = nb & ~comp
            comp |= frontier
        seen |= comp
        out.append(comp)
    return out


def induced_dense(masks: Dense, keep: list[int]) -> Dense:
    return permute_dense_subset(masks, keep)


def permute_dense_subset(masks: Dense, keep: list[int]) -> Dense:
    pos = {v: i for i, v in enumerate(keep)}
    sel = 0
    for v in keep:
        sel |= 1 << v
    out = []
    for v in keep:
        m = masks[v] & sel
        r = 0
        while m:
            low = m & -m
            r |= 1 << pos[low.bit_length() - 1]
            m ^= low
        out.append(r)
    return tuple(out)


# -- gluing and boundaried minors ----------------------------------------------


def compatible(g1: BoundariedGraph, g2: BoundariedGraph) -> bool:
    if g1.t != g2.t:
        return False
    m = dict(zip(g2.boundary, g1.boundary))
    e1 = g1.boundary_graph().edges
    e2 = {tuple(sorted((m[a], m[b]))) for a, b in g2.boundary_graph().edges}
    return e1 == e2


def glue(g1: BoundariedGraph, g2: BoundariedGraph, strict: bool = True) -> Graph:
    """Identify equal labels; g1 keeps its vertex ids, g2's interior is shifted."""
    if g1.t != g2.t or (strict and not compatible(g1, g2)):
        raise IncompatibleBoundaries("boundaries are not compatible")
    m = dict(zip(g2.boundary, g1.boundary))
    shift = max(g1.graph.vertices, default=-1) + 1
    for v in g2.graph.vertices:
        if v not in m:
            m[v] = shift
            shift += 1
    edges = set(g1.graph.edges) | {(m[a], m[b]) for a, b in g2.graph.edges}
    return Graph(set(g1.graph.vertices) | set(m.values()), edges)


def quotients(t: int, masks: Dense, max_inner: int | None = None) -> dict[bytes, Dense]:
    """All graphs reachable by deleting non-boundary vertices and contracting
    edges with a non-boundary endpoint, as canonical dense forms keyed by code.

    With ``max_inner`` only results with at most that many non-boundary
    vertices are returned (the search still visits larger ones).
    """
    code, start = canonical_dense(t, masks)
    seen = {code: start}
    stack = [start]
    while stack:
        cur = stack.pop()
        n = len(cur)
        for v in range(t, n):
            for nxt in _children(cur, t, v):
                c, d = canonical_dense(t, nxt)
                if c not in seen:
                    seen[c] = d
                    stack.append(d)
    if max_inner is None:
        return seen
    return {c: d for c, d in seen.items() if len(d) - t <= max_inner}


def _children(cur: Dense, t: int, v: int):
    yield delete_vertex(cur, v)
    m = cur[v]
    while m:
        low = m & -m
        u = low.bit_length() - 1
        m ^= low
        if u < t:
            yield contract(cur, u, v)
        elif u < v:
            yield contract(cur, u, v)


def embeds_fixed(t: int, small: Dense, big: Dense) -> bool:
    """Is ``small`` a subgraph of ``big`` with the boundary mapped identically?"""
    ns, nb = len(small), len(big)
    if ns > nb:
        return False
    for i in range(t):
        if small[i] & ~big[i] & ((1 << t) - 1):
            return False
    img = list(range(t)) + [0] * (ns - t)
    deg_b = [m.bit_count() for m in big]

    def ok(i: int, c: int) -> bool:
        m = small[i]
        for j in range(i):
            if m >> j & 1 and not big[c] >> img[j] & 1:
                return False
        return True

    def rec(i: int, used: int) -> bool:
        if i == ns:
            return True
        need = small[i].bit_count()
        for c in range(t, nb):
            if used >> c & 1 or deg_b[c] < need:
                continue
            if ok(i, c):
                img[i] = c
                if rec(i + 1, used | (1 << c)):
                    return True
        return False

    # boundary-to-boundary edges were checked above; remaining rows need mapping
    return rec(t, 0)


def boundaried_is_minor(h: BoundariedGraph, g: BoundariedGraph) -> bool:
    """Does g reduce to h (labels fixed) by non-boundary deletions, edge
    deletions and contractions in which boundary vertices prevail?"""
    if h.t != g.t:
        raise IncompatibleBoundaries("boundary sizes differ")
    t = h.t
    hd = h.dense()
    hm = dense_edges(hd)
    for q in quotients(t, g.dense()).values():
        if len(q) >= len(hd) and dense_edges(q) >= hm and embeds_fixed(t, hd, q):
            return True
    return False


# -- signatures ---------------------------------------------------------------


@dataclass(frozen=True)
class FolioSignature:
    """Boundaried minors with at most ``detail_bound`` non-boundary vertices.

    ``maximal`` holds the canonical codes of the maximal members; the full
    set is their closure under edge deletion (see :meth:`members`).
    """

    t: int
    detail_bound: int
    maximal: tuple[bytes, ...]
    _graphs: tuple[Dense, ...] = ()

    def __eq__(self, other):
        if not isinstance(other, FolioSignature):
            return NotImplemented
        return (self.t, self.detail_bound, self.maximal) == (other.t, other.detail_bound, other.maximal)

    def __hash__(self):
        return hash((self.t, self.detail_bound, self.maximal))

    @property
    def key(self) -> tuple:
        return (self.t, self.detail_bound, self.maximal)

    def digest(self) -> str:
        return sha256(b"\n".join(self.maximal)).hexdigest()[:16]

    def members(self) -> frozenset[bytes]:
        """Every code in the signature (closure under edge deletion)."""
        out: set[bytes] = set()
        for d in self._graphs:
            edges = [(i, j) for i in range(len(d)) for j in range(i + 1, len(d)) if d[i] >> j & 1]
            for mask in range(1 << len(edges)):
                cur = d
                for k, (i, j) in enumerate(edges):
                    if mask >> k & 1:
                        cur = delete_edge(cur, i, j)
                out.add(dense_code(self.t, cur))
        return frozenset(out)


_sig_cache: dict[tuple[int, bytes], FolioSignature] = {}


def signature_dense(t: int, masks: Dense, h: int) -> FolioSignature:
    # maximal quotients of G are the maximal elements among G itself (when
    # small enough) and the maximal quotients of its one-step children
    code, canon = canonical_dense(t, masks)
    hit = _sig_cache.get((h, code))
    if hit is not None:
        return hit
    cands: dict[bytes, Dense] = {}
    if len(canon) - t <= h:
        cands[code] = canon
    for v in range(t, len(canon)):
        for child in _children(canon, t, v):
            sub = signature_dense(t, child, h)
            for c, d in zip(sub.maximal, sub._graphs):
                cands.setdefault(c, d)
    by_size: dict[int, list[tuple[int, bytes, Dense]]] = {}
    for c, d in cands.items():
        by_size.setdefault(len(d), []).append((_profile(t, d)[0], c, d))
    maximal: list[tuple[bytes, Dense]] = []
    for size in sorted(by_size):
        group = sorted(by_size[size], key=lambda x: (-x[0], x[1]))
        kept: list[Dense] = []
        for m, c, d in group:
            if not any(_spanning_leq(t, d, k) for k in kept):
                kept.append(d)
                maximal.append((c, d))
    maximal.sort()
    sig = FolioSignature(t, h, tuple(c for c, _ in maximal), tuple(d for _, d in maximal))
    _sig_cache.setdefault((h, code), sig)
    return sig


_profile_cache: dict[tuple[int, Dense], tuple] = {}


def _profile(t: int, d: Dense) -> tuple:
    key = (t, d)
    hit = _profile_cache.get(key)
    if hit is None:
        degs = [m.bit_count() for m in d]
        hit = (sum(degs) // 2, degs[:t], sorted(degs[t:]))
        if len(_profile_cache) >= _CANON_CACHE_MAX:
            _profile_cache.clear()
        _profile_cache[key] = hit
    return hit


def _spanning_leq(t: int, small: Dense, big: Dense) -> bool:
    """Is small a spanning subgraph of big (boundary fixed), with fewer edges?"""
    ms, bs, is_ = _profile(t, small)
    mb, bb, ib = _profile(t, big)
    if ms >= mb:
        return False
    if any(a > b for a, b in zip(bs, bb)) or any(a > b for a, b in zip(is_, ib)):
        return False
    n = len(small)
    low = (1 << t) - 1
    for i in range(t):
        if small[i] & ~big[i] & low:
            return False
    inner = range(t, n)
    cands = {}
    for i in inner:
        need, deg = small[i] & low, small[i].bit_count()
        cands[i] = [j for j in inner if not need & ~big[j] and deg <= big[j].bit_count()]
        if not cands[i]:
            return False
    order = sorted(inner, key=lambda i: len(cands[i]))
    img: dict[int, int] = {}

    def rec(pos: int, used: int) -> bool:
        if pos == len(order):
            return True
        i = order[pos]
        for j in cands[i]:
            if used >> j & 1:
                continue
            bj = big[j]
            if all(bj >> img[x] & 1 for x in img if small[i] >> x & 1):
                img[i] = j
                if rec(pos + 1, used | (1 << j)):
                    return True
                del img[i]
        return False

    return rec(0, 0)


def folio_signature(g: BoundariedGraph, h: int) -> FolioSignature:
    if h < 1:
        raise ValueError("detail bound must be >= 1")
    return signature_dense(g.t, g.dense(), h)


# -- representatives --------------------------------------------------------------


class RepresentativeRegistry:
    """(t, h, signature) -> first reduced representative seen; thread-safe."""

    def __init__(self):
        self._map: dict[tuple, Dense] = {}
        self._sigs: dict[tuple, FolioSignature] = {}
        self._memo: dict[tuple[int, bytes], Dense] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._map)

    def lookup(self, key: tuple) -> Dense | None:
        return self._map.get(key)

    def insert(self, sig: FolioSignature, rep: Dense) -> Dense:
        with self._lock:
            self._sigs.setdefault(sig.key, sig)
            return self._map.setdefault(sig.key, rep)

    def memo_get(self, h: int, code: bytes) -> Dense | None:
        return self._memo.get((h, code))

    def memo_put(self, h: int, code: bytes, rep: Dense) -> None:
        with self._lock:
            self._memo.setdefault((h, code), rep)

    def entries(self) -> list[tuple[FolioSignature, BoundariedGraph]]:
        return [
            (self._sigs[k], BoundariedGraph.from_dense(k[0], d))
            for k, d in sorted(self._map.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2]))
        ]

    def sizes(self) -> dict[tuple[int, int], list[int]]:
        out: dict[tuple[int, int], list[int]] = {}
        for (t, h, _), d in self._map.items():
            out.setdefault((t, h), []).append(len(d))
        return out

    def to_json(self) -> str:
        rows = []
        for sig, rep in self.entries():
            rows.append(
                {
                    "t": sig.t,
                    "h": sig.detail_bound,
                    "signature": sig.digest(),
                    "edges": [list(e) for e in rep.graph.sorted_edges()],
                    "n": rep.graph.n,
                    "boundary": {str(v): i + 1 for i, v in enumerate(rep.boundary)},
                }
            )
        return json.dumps(rows, indent=1, sort_keys=True)


def _moves(t: int, d: Dense) -> Iterable[Dense]:
    n = len(d)
    for v in range(n - 1, t - 1, -1):
        m = d[v]
        for u in range(v):
            if m >> u & 1:
                yield contract(d, u, v)
    for v in range(n - 1, t - 1, -1):
        yield delete_vertex(d, v)
    for v in range(n - 1, -1, -1):
        for u in range(v):
            if d[v] >> u & 1 and v >= t:
                yield delete_edge(d, u, v)


def _unlabeled_components(t: int, d: Dense) -> int:
    low = (1 << t) - 1
    return sum(1 for c in dense_components(d) if not c & low)


def represent_dense(t: int, masks: Dense, h: int, reg: RepresentativeRegistry) -> Dense:
    """Canonical dense representative of (masks, boundary 0..t-1)."""
    code, canon = canonical_dense(t, masks)
    if len(canon) - t <= h:
        # the graph is a member of its own signature, so nothing smaller shares it
        return canon
    hit = reg.memo_get(h, code)
    if hit is not None:
        return hit
    sig = signature_dense(t, canon, h)
    rep = reg.lookup(sig.key)
    if rep is None:
        cur = canon
        loose = _unlabeled_components(t, cur)
        progress = True
        while progress:
            progress = False
            for cand in _moves(t, cur):
                if _unlabeled_components(t, cand) > loose:
                    continue
                if signature_dense(t, cand, h) == sig:
                    cur = canonical_dense(t, cand)[1]
                    progress = True
                    break
        rep = reg.insert(sig, cur)
    reg.memo_put(h, code, rep)
    return rep


def reduce_to_representative(
    g: BoundariedGraph, h: int, reg: RepresentativeRegistry
) -> BoundariedGraph:
    return BoundariedGraph.from_dense(g.t, represent_dense(g.t, g.dense(), h, reg))
