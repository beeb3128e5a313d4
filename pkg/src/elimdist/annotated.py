"""Annotated trees (the DP states) and the crop / representation / filter pipeline.

An annotated tree compresses an elimination forest of a boundaried graph
down to what matters for gluing: the nodes whose subtree holds a boundary
vertex, their heights in the full forest, where each label sits, the
graphs induced by the labeled nodes (replaced by representatives) and,
for every node, which labels below it are connected through its subtree.
"""

from __future__ import annotations

import json
import threading
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import cached_property

from elimdist.boundaried import (
    Dense,
    RepresentativeRegistry,
    _graph_of,
    canonical_dense,
    dense_components,
    permute_dense,
    permute_dense_subset,
    represent_dense,
)
from elimdist.minors import ObstructionFamily, in_exc


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


@dataclass(frozen=True)
class AnnotatedTree:
    """Nodes are ``0..N-1``; ``parent[v] == -1`` marks a root.

    ``f[i]`` is the node holding label ``i + 1``.  ``R`` is dense with the
    ``t`` labels first (vertex ``i`` is label ``i + 1``) and is the disjoint
    union of the graphs induced by the labeled nodes.  ``links[v]`` is a
    sorted tuple of label bitmasks: the labels in the subtree of ``v``
    grouped by connectivity of the graph induced by that subtree.
    """

    parent: tuple[int, ...]
    h: tuple[int, ...]
    f: tuple[int, ...]
    R: Dense
    links: tuple[tuple[int, ...], ...]

    @property
    def t(self) -> int:
        return len(self.f)

    @property
    def size(self) -> int:
        return len(self.parent)

    @property
    def height(self) -> int:
        return max(self.h, default=0)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return tuple(tuple(c) for c in ch)

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(v for v, p in enumerate(self.parent) if p < 0)

    @cached_property
    def labels_at(self) -> tuple[int, ...]:
        out = [0] * self.size
        for i, v in enumerate(self.f):
            out[v] |= 1 << i
        return tuple(out)

    def below(self, v: int) -> int:
        """Bitmask of the labels in the subtree of v."""
        m = 0
        for c in self.links[v]:
            m |= c
        return m

    def ancestors(self, v: int) -> list[int]:
        """v and its ancestors, bottom-up."""
        out = []
        while v >= 0:
            out.append(v)
            v = self.parent[v]
        return out

    def postorder(self) -> list[int]:
        out: list[int] = []
        stack = [(r, False) for r in reversed(self.roots)]
        ch = self.children
        while stack:
            v, done = stack.pop()
            if done:
                out.append(v)
            else:
                stack.append((v, True))
                stack.extend((c, False) for c in reversed(ch[v]))
        return out

    def part(self, v: int) -> tuple[list[int], Dense]:
        """Labels (0-based, ascending) at v and the dense graph attached to them."""
        labs = list(_bits(self.labels_at[v]))
        lm = self.labels_at[v]
        keep = 0
        for c in dense_components(self.R):
            if c & lm:
                keep |= c
        inner = [x for x in _bits(keep) if x >= self.t]
        return labs, permute_dense_subset(self.R, labs + inner)

    def is_single(self, v: int) -> bool:
        """Does v hold exactly one label and nothing else?"""
        lm = self.labels_at[v]
        return lm.bit_count() == 1 and self.R[lm.bit_length() - 1] == 0

    @cached_property
    def _canon(self) -> tuple[bytes, AnnotatedTree]:
        return _canonicalize(self)

    @property
    def code(self) -> bytes:
        return self._canon[0]

    def normalized(self) -> AnnotatedTree:
        return self._canon[1]

    def to_dict(self) -> dict:
        n = len(self.R)
        return {
            "parent": list(self.parent),
            "h": list(self.h),
            "f": {str(i + 1): v for i, v in enumerate(self.f)},
            "R": {
                "n": n,
                "edges": [[i, j] for i in range(n) for j in _bits(self.R[i]) if j > i],
                "boundary": {str(i): i + 1 for i in range(self.t)},
            },
            "links": [list(c) for c in self.links],
        }


def trivial() -> AnnotatedTree:
    """The one-node tree holding the single label 1."""
    return AnnotatedTree((-1,), (0,), (0,), (0,), ((1,),))


# -- canonical encoding ---------------------------------------------------------


def _canonicalize(tr: AnnotatedTree) -> tuple[bytes, AnnotatedTree]:
    ch = tr.children
    keys: list[str] = [""] * tr.size
    for v in tr.postorder():
        sub = "".join(sorted(keys[c] for c in ch[v]))
        links = ",".join("%x" % c for c in tr.links[v])
        keys[v] = "(%d.%x.%s%s)" % (tr.h[v], tr.labels_at[v], links, sub)
    order: list[int] = []
    stack = sorted(tr.roots, key=keys.__getitem__, reverse=True)
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(sorted(ch[v], key=keys.__getitem__, reverse=True))
    pos = {v: i for i, v in enumerate(order)}
    rcode, rmasks = canonical_dense(tr.t, tr.R)
    out = AnnotatedTree(
        tuple(pos[tr.parent[v]] if tr.parent[v] >= 0 else -1 for v in order),
        tuple(tr.h[v] for v in order),
        tuple(pos[v] for v in tr.f),
        rmasks,
        tuple(tr.links[v] for v in order),
    )
    code = "".join(sorted(keys[r] for r in tr.roots)).encode() + b"#" + rcode
    return code, out


def canonical_encode(tr: AnnotatedTree) -> bytes:
    """Equal codes iff the annotated trees are isomorphic with labels fixed."""
    return tr.code


# -- permutation ------------------------------------------------------------------


def permute(tr: AnnotatedTree, sigma: Iterable[int]) -> AnnotatedTree:
    """Relabel: label ``i`` becomes ``sigma[i - 1]`` (both 1-based)."""
    sigma = tuple(sigma)
    t = tr.t
    if sorted(sigma) != list(range(1, t + 1)):
        raise ValueError("sigma must be a permutation of 1..t")
    f = [0] * t
    for i, s in enumerate(sigma):
        f[s - 1] = tr.f[i]
    order = [0] * t
    for i, s in enumerate(sigma):
        order[s - 1] = i
    order += list(range(t, len(tr.R)))
    R = permute_dense(tr.R, order)

    def remap(m: int) -> int:
        r = 0
        for i in _bits(m):
            r |= 1 << (sigma[i] - 1)
        return r

    links = tuple(tuple(sorted(remap(c) for c in cls)) for cls in tr.links)
    return AnnotatedTree(tr.parent, tr.h, tuple(f), R, links)


# -- crop / rep / filter ------------------------------------------------------------


def crop(tr: AnnotatedTree) -> AnnotatedTree:
    """Drop every node whose subtree holds no label."""
    keep = [False] * tr.size
    for v in tr.f:
        while v >= 0 and not keep[v]:
            keep[v] = True
            v = tr.parent[v]
    if all(keep):
        return tr
    idx = {}
    for v in range(tr.size):
        if keep[v]:
            idx[v] = len(idx)
    nodes = list(idx)
    return AnnotatedTree(
        tuple(idx[tr.parent[v]] if tr.parent[v] >= 0 else -1 for v in nodes),
        tuple(tr.h[v] for v in nodes),
        tuple(idx[v] for v in tr.f),
        tr.R,
        tuple(tr.links[v] for v in nodes),
    )


_exc_dense_cache: dict[tuple[bytes, Dense], bool] = {}
_exc_dense_lock = threading.Lock()


def exc_dense(masks: Dense, family: ObstructionFamily) -> bool:
    key = (family.fingerprint, masks)
    hit = _exc_dense_cache.get(key)
    if hit is None:
        hit = in_exc(_graph_of(masks), family)
        with _exc_dense_lock:
            _exc_dense_cache[key] = hit
    return hit


def rep_op(
    tr: AnnotatedTree,
    family: ObstructionFamily,
    reg: RepresentativeRegistry,
    detail: int | None = None,
) -> AnnotatedTree | None:
    """Replace each labeled node's graph by its representative.

    Returns None (discard) when some node's graph is not in exc(F).
    """
    h = family.s_F if detail is None else detail
    t = tr.t
    parts: list[tuple[list[int], Dense]] = []
    seen = 0
    for v in range(tr.size):
        lm = tr.labels_at[v]
        if not lm or lm & seen:
            continue
        seen |= lm
        labs, pv = tr.part(v)
        if len(pv) > 1:
            if not exc_dense(pv, family):
                return None
            pv = represent_dense(len(labs), pv, h, reg)
        parts.append((labs, pv))
    total = t + sum(len(pv) - len(labs) for labs, pv in parts)
    R = [0] * total
    nxt = t
    for labs, pv in parts:
        where = labs + list(range(nxt, nxt + len(pv) - len(labs)))
        nxt += len(pv) - len(labs)
        for i, m in enumerate(pv):
            r = 0
            for j in _bits(m):
                r |= 1 << where[j]
            R[where[i]] |= r
    return AnnotatedTree(tr.parent, tr.h, tr.f, tuple(R), tr.links)


def filter_k(entries: Iterable[AnnotatedTree], k: int) -> list[AnnotatedTree]:
    if k < 0:
        raise ValueError("k must be non-negative")
    return [e for e in entries if e.height <= k]


class Characteristic:
    """A deduplicated set of annotated trees over ``t`` labels, heights <= k."""

    def __init__(self, t: int, k: int, entries: Iterable[AnnotatedTree] = ()):
        self.t = t
        self.k = k
        self._entries: dict[bytes, AnnotatedTree] = {}
        for e in entries:
            self.add(e)

    def add(self, e: AnnotatedTree) -> None:
        if e.t != self.t:
            raise ValueError(f"entry has {e.t} labels, expected {self.t}")
        self._entries.setdefault(e.code, e.normalized())

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[AnnotatedTree]:
        return (self._entries[c] for c in sorted(self._entries))

    def __contains__(self, e: object) -> bool:
        return isinstance(e, AnnotatedTree) and e.code in self._entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Characteristic):
            return NotImplemented
        return self.t == other.t and self.codes() == other.codes()

    def __repr__(self) -> str:
        return f"Characteristic(t={self.t}, k={self.k}, entries={len(self)})"

    def codes(self) -> frozenset[bytes]:
        return frozenset(self._entries)

    def min_height(self) -> int | None:
        return min((e.height for e in self._entries.values()), default=None)

    def to_json(self) -> str:
        return json.dumps(
            {"t": self.t, "k": self.k, "entries": [e.to_dict() for e in self]},
            indent=1,
            sort_keys=True,
        )


def m_k(
    entries: Iterable[AnnotatedTree],
    k: int,
    family: ObstructionFamily,
    reg: RepresentativeRegistry,
    t: int | None = None,
) -> Characteristic:
    """filter_k . rep . crop, entrywise, deduplicated."""
    entries = list(entries)
    if t is None:
        if not entries:
            raise ValueError("t is required for an empty input")
        t = entries[0].t
    out = Characteristic(t, k)
    for e in entries:
        r = rep_op(crop(e), family, reg)
        if r is not None and r.height <= k:
            out.add(r)
    return out
