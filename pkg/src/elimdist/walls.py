"""Walls, subwalls, canonical partitions and bidimensionality.

Walls are built from the ``2r x r`` grid; vertex ids follow row-major
order of the grid coordinates ``(x, y)``.  Subwalls are subgraphs picked
out by a choice of horizontal and vertical paths; when the chosen paths
are not consecutive the result is a subdivided wall.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from elimdist.graph import Graph


class WallError(ValueError):
    pass


Path = tuple[int, ...]


@dataclass(frozen=True)
class Wall:
    """An r-wall together with its horizontal and vertical paths (top-down, left-right)."""

    graph: Graph
    r: int
    horizontal_paths: tuple[Path, ...]
    vertical_paths: tuple[Path, ...]
    pegs: frozenset[int]
    corners: frozenset[int]
    coords: dict[int, tuple[int, int]] = field(default_factory=dict, compare=False)

    @property
    def perimeter(self) -> frozenset[int]:
        """Vertices of the cycle bounding the outer face."""
        hp, vp = self.horizontal_paths, self.vertical_paths
        return frozenset(hp[0]) | frozenset(hp[-1]) | frozenset(vp[0]) | frozenset(vp[-1])

    def branch_vertices(self) -> frozenset[int]:
        return frozenset(v for v in self.graph.vertices if self.graph.degree(v) == 3)


def _check_odd(r: int, what: str = "r") -> None:
    if not isinstance(r, int) or r < 3 or r % 2 == 0:
        raise WallError(f"{what} must be an odd integer >= 3, got {r!r}")


def elementary_wall(r: int) -> Wall:
    _check_odd(r)
    cols = 2 * r
    grid = [(x, y) for y in range(1, r + 1) for x in range(1, cols + 1)]
    nbrs: dict[tuple[int, int], list[tuple[int, int]]] = {p: [] for p in grid}
    for x, y in grid:
        if x < cols:
            nbrs[(x, y)].append((x + 1, y))
            nbrs[(x + 1, y)].append((x, y))
        if y < r and (x + y) % 2 == 0:
            nbrs[(x, y)].append((x, y + 1))
            nbrs[(x, y + 1)].append((x, y))
    alive = [p for p in grid if len(nbrs[p]) > 1]
    at = {p: i for i, p in enumerate(alive)}
    edges = [(at[p], at[q]) for p in alive for q in nbrs[p] if q in at and at[p] < at[q]]
    g = Graph(range(len(alive)), edges)
    horiz = tuple(
        tuple(at[(x, y)] for x in range(1, cols + 1) if (x, y) in at) for y in range(1, r + 1)
    )
    vert = []
    for i in range(1, cols, 2):
        seq = [(i, 1)]
        for y in range(2, r + 1):
            seq += [(i, y), (i + 1, y)] if y % 2 == 0 else [(i + 1, y), (i, y)]
        vert.append(tuple(at[p] for p in seq if p in at))
    return _finish(g, r, horiz, tuple(vert), {i: p for p, i in at.items()})


def _finish(g: Graph, r: int, horiz, vert, coords) -> Wall:
    perim = set(horiz[0]) | set(horiz[-1]) | set(vert[0]) | set(vert[-1])
    on_both = set().union(*map(set, horiz)) & set().union(*map(set, vert))
    pegs = frozenset(v for v in perim if g.degree(v) == 2 and v in on_both)
    corners = frozenset({horiz[0][0], horiz[0][-1], horiz[-1][0], horiz[-1][-1]})
    return Wall(g, r, horiz, vert, pegs, corners, coords)


# -- subwalls ---------------------------------------------------------------------


def _rows_ok(rows: Sequence[int]) -> bool:
    # skipping an odd number of rows between two interior rows shifts the bricks
    gaps = [b - a for a, b in zip(rows, rows[1:])]
    return all(g % 2 for g in gaps[1:-1])


def subwall(w: Wall, rows: Sequence[int], cols: Sequence[int]) -> Wall:
    """The wall formed by the chosen horizontal and vertical paths (1-based indices)."""
    rows, cols = sorted(rows), sorted(cols)
    if len(rows) != len(cols):
        raise WallError("a subwall needs as many rows as columns")
    _check_odd(len(rows), "subwall height")
    hp, vp = w.horizontal_paths, w.vertical_paths
    if rows[0] < 1 or rows[-1] > len(hp) or cols[0] < 1 or cols[-1] > len(vp):
        raise WallError("path index out of range")
    if not _rows_ok(rows):
        raise WallError("gaps between interior rows must be odd")
    hsegs = []
    for j in rows:
        row = hp[j - 1]
        first = set(vp[cols[0] - 1])
        last = set(vp[cols[-1] - 1])
        lo = min(i for i, v in enumerate(row) if v in first)
        hi = max(i for i, v in enumerate(row) if v in last)
        hsegs.append(row[lo : hi + 1])
    vsegs = []
    for c in cols:
        col = vp[c - 1]
        top = set(hp[rows[0] - 1])
        bot = set(hp[rows[-1] - 1])
        lo = min(i for i, v in enumerate(col) if v in top)
        hi = max(i for i, v in enumerate(col) if v in bot)
        vsegs.append(col[lo : hi + 1])
    edges = set()
    for seg in hsegs + vsegs:
        edges.update(zip(seg, seg[1:]))
    g = Graph(set().union(*map(set, hsegs + vsegs)), edges)
    while True:
        ones = [v for v in g.vertices if g.degree(v) <= 1]
        if not ones:
            break
        g = g.delete_vertices(ones)
    keep = g.vertex_set
    horiz = tuple(tuple(v for v in s if v in keep) for s in hsegs)
    vert = tuple(tuple(v for v in s if v in keep) for s in vsegs)
    coords = {v: xy for v, xy in w.coords.items() if v in keep}
    return _finish(g, len(rows), horiz, vert, coords)


def central_subwall(w: Wall, q: int) -> Wall:
    """Remove the outer (r - q) / 2 layers and the vertices left with degree one."""
    _check_odd(q, "q")
    if q > w.r:
        raise WallError(f"q = {q} exceeds the wall height {w.r}")
    d = (w.r - q) // 2
    idx = range(d + 1, w.r - d + 1)
    return subwall(w, idx, idx)


def layers(w: Wall) -> list[frozenset[int]]:
    """Layer i is the perimeter of the central (r - 2i + 2)-subwall."""
    return [central_subwall(w, w.r - 2 * i).perimeter for i in range((w.r - 1) // 2)]


def central_vertices(w: Wall) -> frozenset[int]:
    covered = frozenset().union(*layers(w))
    return frozenset(v for v in w.branch_vertices() if v not in covered)


def subwall_avoiding(w: Wall, s: Iterable[int]) -> Wall | None:
    """A largest subwall disjoint from s built only from paths that avoid s.

    Rows meeting s are dropped, and interior rows must sit an odd
    distance apart so the bricks line up.  A column is usable when the stretch of
    it running between the outermost chosen rows avoids s.  Heights are
    trimmed to odd values; returns None when no 3-subwall survives.
    """
    s = frozenset(s)
    if not s & w.graph.vertex_set:
        return w
    hp, vp = w.horizontal_paths, w.vertical_paths
    free_rows = [j for j in range(1, len(hp) + 1) if not s & set(hp[j - 1])]
    for h in range(min(len(free_rows), len(vp)), 2, -1):
        if h % 2 == 0:
            continue
        for rows in combinations(free_rows, h):
            if not _rows_ok(rows):
                continue
            top, bot = set(hp[rows[0] - 1]), set(hp[rows[-1] - 1])
            good = []
            for c, col in enumerate(vp, 1):
                lo = min(i for i, v in enumerate(col) if v in top)
                hi = max(i for i, v in enumerate(col) if v in bot)
                if not s & set(col[lo : hi + 1]):
                    good.append(c)
            if len(good) >= h:
                return subwall(w, rows, good[:h])
    return None


# -- canonical partition -------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalPartition:
    """``internal_bags[(i, j)]`` for ``i, j`` in ``2..r-1`` plus one external bag."""

    r: int
    internal_bags: dict[tuple[int, int], frozenset[int]]
    external_bag: frozenset[int]

    def bags(self) -> list[frozenset[int]]:
        return [self.internal_bags[k] for k in sorted(self.internal_bags)] + [self.external_bag]


def canonical_partition(w: Wall) -> CanonicalPartition:
    hp, vp, r = w.horizontal_paths, w.vertical_paths, w.r
    rows = [set(p) for p in hp]
    bags: dict[tuple[int, int], frozenset[int]] = {}
    for i in range(2, r):
        col = vp[i - 1]
        for j in range(2, r):
            inter = [k for k, v in enumerate(col) if v in rows[j - 1]]
            if i % 2 == 0:
                k = inter[0]
                a = []
                while k < len(col) and col[k] not in rows[j]:
                    a.append(col[k])
                    k += 1
            else:
                k = inter[-1]
                a = []
                while k >= 0 and col[k] not in rows[j - 2]:
                    a.append(col[k])
                    k -= 1
            row = hp[j - 1]
            prev, cur = set(vp[i - 2]), set(col)
            start = max(k for k, v in enumerate(row) if v in prev) + 1
            end = max(k for k, v in enumerate(row) if v in cur)
            bags[(i, j)] = frozenset(a) | frozenset(row[start : end + 1])
    used = frozenset().union(*bags.values())
    return CanonicalPartition(r, bags, w.graph.vertex_set - used)


def validate_partition(w: Wall, cp: CanonicalPartition) -> str | None:
    """None if the bags partition V(W) and each internal bag is connected."""
    seen: set[int] = set()
    for b in cp.bags():
        if seen & b:
            return "bags overlap"
        seen |= b
    if seen != set(w.graph.vertex_set):
        return "bags do not cover the wall"
    for key in sorted(cp.internal_bags):
        b = cp.internal_bags[key]
        if not b or not w.graph.subgraph(b).is_connected():
            return f"internal bag {key} is empty or disconnected"
    return None


def bidimensionality(cp: CanonicalPartition, x: Iterable[int]) -> int:
    """Number of internal bags that meet x."""
    x = frozenset(x)
    return sum(1 for b in cp.internal_bags.values() if b & x)
