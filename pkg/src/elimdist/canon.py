"""Canonical labeling by colour refinement plus individualization.

Disconnected graphs are labeled component by component; the code of a
graph is the sorted list of its component codes.  Inside a component the
search branches on the first non-singleton cell, skipping vertices that
are twins of an already explored vertex (swapping twins is an
automorphism, so their subtrees give the same leaves).
"""

from __future__ import annotations

from collections.abc import Mapping

from elimdist.graph import Graph

CanonicalForm = bytes


def _refine(cells: list[list[int]], masks: list[int]) -> list[list[int]]:
    while True:
        cmasks = []
        for c in cells:
            m = 0
            for v in c:
                m |= 1 << v
            cmasks.append(m)
        out: list[list[int]] = []
        for ci, c in enumerate(cells):
            if len(c) == 1:
                out.append(c)
                continue
            keyed = sorted(
                (tuple((masks[v] & cm).bit_count() for cm in cmasks), v) for v in c
            )
            cur = [keyed[0][1]]
            for (k0, _), (k1, v) in zip(keyed, keyed[1:]):
                if k1 != k0:
                    out.append(cur)
                    cur = [v]
                else:
                    cur.append(v)
            out.append(cur)
        if len(out) == len(cells):
            return out
        cells = out


def _twin_reps(cell: list[int], masks: list[int]) -> list[int]:
    parent = {v: v for v in cell}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for closed in (False, True):
        seen: dict[int, int] = {}
        for v in cell:
            key = masks[v] | (1 << v) if closed else masks[v]
            if key in seen:
                a, b = find(seen[key]), find(v)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                seen[key] = v
    return [v for v in cell if find(v) == v]


def _leaf_code(perm: list[int], masks: list[int], colors: list[int]) -> tuple:
    pos = {v: i for i, v in enumerate(perm)}
    rows = []
    for v in perm:
        r = 0
        m = masks[v]
        while m:
            low = m & -m
            r |= 1 << pos[low.bit_length() - 1]
            m ^= low
        rows.append(r)
    return (tuple(colors[v] for v in perm), tuple(rows))


def _search(cells, masks, colors, best):
    cells = _refine(cells, masks)
    target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
    if target is None:
        perm = [c[0] for c in cells]
        code = _leaf_code(perm, masks, colors)
        if best[0] is None or code < best[0]:
            best[0] = code
            best[1] = perm
        return
    cell = cells[target]
    for v in _twin_reps(cell, masks):
        rest = [u for u in cell if u != v]
        _search(cells[:target] + [[v], rest] + cells[target + 1 :], masks, colors, best)


def _component_label(verts: list[int], masks: list[int], colors: list[int]):
    # verts are dense indices of one component; relabel them to 0..k-1
    local = {v: i for i, v in enumerate(verts)}
    lmask = []
    for v in verts:
        m = 0
        x = masks[v]
        while x:
            low = x & -x
            m |= 1 << local[low.bit_length() - 1]
            x ^= low
        lmask.append(m)
    lcol = [colors[v] for v in verts]
    by_color: dict[int, list[int]] = {}
    for i, c in enumerate(lcol):
        by_color.setdefault(c, []).append(i)
    cells = [by_color[c] for c in sorted(by_color)]
    best: list = [None, None]
    _search(cells, lmask, lcol, best)
    cols, rows = best[0]
    code = "%d:%s:%s" % (
        len(verts),
        ",".join(map(str, cols)),
        ",".join("%x" % r for r in rows),
    )
    return code.encode(), [verts[i] for i in best[1]]


def _components(n: int, masks: list[int]) -> list[list[int]]:
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
        out.append([i for i in range(n) if comp >> i & 1])
    return out


def canonical_masks(masks: list[int], colors: list[int]) -> tuple[bytes, list[int]]:
    """Canonical code and order for a dense graph given by adjacency bitmasks."""
    parts = [_component_label(c, masks, colors) for c in _components(len(masks), masks)]
    parts.sort(key=lambda p: p[0])
    return b"|".join(p[0] for p in parts), [i for p in parts for i in p[1]]


def canonical_labeling(
    g: Graph, colors: Mapping[int, int] | None = None
) -> tuple[CanonicalForm, tuple[int, ...]]:
    """Return ``(code, order)``; ``order`` lists vertex ids in canonical position."""
    order, _, masks = g.bitmasks
    col = [0] * len(order) if colors is None else [colors.get(v, 0) for v in order]
    code, perm = canonical_masks(masks, col)
    return code, tuple(order[i] for i in perm)


def canonical_form(g: Graph, colors: Mapping[int, int] | None = None) -> CanonicalForm:
    """Isomorphism-invariant byte code; colors (if given) must be preserved."""
    return canonical_labeling(g, colors)[0]


def canonical_graph(g: Graph, colors: Mapping[int, int] | None = None) -> Graph:
    """The canonical representative of g's class on vertices 0..n-1."""
    _, perm = canonical_labeling(g, colors)
    return g.relabel({v: i for i, v in enumerate(perm)})


def are_isomorphic(a: Graph, b: Graph) -> bool:
    return a.n == b.n and a.m == b.m and canonical_form(a) == canonical_form(b)
