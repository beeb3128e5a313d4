"""Rooted tree decompositions, nice form, exact/heuristic construction, PACE I/O."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from elimdist.graph import Graph

EXACT_CAP = 18


class Violation(NamedTuple):
    kind: str
    witness: object
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree decomposition; ``parent[root] is None``."""

    bags: Mapping[int, frozenset[int]]
    parent: Mapping[int, int | None]
    root: int
    exact: bool = field(default=False, compare=False)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def children(self) -> dict[int, list[int]]:
        ch: dict[int, list[int]] = {t: [] for t in self.bags}
        for t, p in self.parent.items():
            if p is not None:
                ch[p].append(t)
        for c in ch.values():
            c.sort()
        return ch

    def postorder(self) -> list[int]:
        ch = self.children()
        out, stack = [], [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                out.append(t)
            else:
                stack.append((t, True))
                stack.extend((c, False) for c in reversed(ch[t]))
        return out

    @classmethod
    def from_edges(
        cls, bags: Mapping[int, Iterable[int]], edges: Iterable[tuple[int, int]], root: int
    ) -> TreeDecomposition:
        b = {t: frozenset(vs) for t, vs in bags.items()}
        nb: dict[int, list[int]] = {t: [] for t in b}
        for x, y in edges:
            nb[x].append(y)
            nb[y].append(x)
        parent: dict[int, int | None] = {root: None}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in nb[x]:
                if y not in parent:
                    parent[y] = x
                    stack.append(y)
        if len(parent) != len(b):
            raise ValueError("decomposition tree is not connected")
        return cls(b, parent, root)


class Kind(Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceTreeDecomposition(TreeDecomposition):
    kind: Mapping[int, Kind] = field(default_factory=dict)
    vertex: Mapping[int, int] = field(default_factory=dict)  # introduced/forgotten vertex


def _tree_violation(td: TreeDecomposition) -> Violation | None:
    if td.root not in td.bags or td.parent.get(td.root, 0) is not None:
        return Violation("tree", td.root, "root missing or has a parent")
    if set(td.parent) != set(td.bags):
        return Violation("tree", None, "parent map and bag map disagree")
    for t in td.bags:
        seen = {t}
        x = t
        while td.parent[x] is not None:
            x = td.parent[x]
            if x in seen or x not in td.bags:
                return Violation("tree", t, f"node {t} does not reach the root")
            seen.add(x)
        if x != td.root:
            return Violation("tree", t, f"node {t} does not reach the root")
    return None


def validate(td: TreeDecomposition, g: Graph) -> Violation | None:
    """First violated axiom, or None when ``td`` is a tree decomposition of ``g``."""
    bad = _tree_violation(td)
    if bad:
        return bad
    covered = set().union(*td.bags.values()) if td.bags else set()
    for v in g.vertices:
        if v not in covered:
            return Violation("vertex", v, f"vertex {v} is in no bag")
    extra = covered - g.vertex_set
    if extra:
        v = min(extra)
        return Violation("vertex", v, f"bag vertex {v} is not in the graph")
    for u, v in g.sorted_edges():
        if not any(u in b and v in b for b in td.bags.values()):
            return Violation("edge", (u, v), f"edge {u}-{v} is in no bag")
    for v in g.vertices:
        nodes = {t for t, b in td.bags.items() if v in b}
        tops = [t for t in nodes if td.parent[t] not in nodes]
        if len(tops) != 1:
            return Violation("connectivity", v, f"bags containing {v} are not connected")
    return None


def validate_nice(td: NiceTreeDecomposition, g: Graph) -> Violation | None:
    bad = validate(td, g)
    if bad:
        return bad
    ch = td.children()
    for t, b in td.bags.items():
        k = td.kind[t]
        c = ch[t]
        if k is Kind.LEAF:
            ok = not c and len(b) == 1
        elif k is Kind.JOIN:
            ok = len(c) == 2 and td.bags[c[0]] == b == td.bags[c[1]]
        elif k is Kind.INTRODUCE:
            v = td.vertex[t]
            ok = len(c) == 1 and v in b and td.bags[c[0]] == b - {v}
        else:
            v = td.vertex[t]
            ok = len(c) == 1 and v not in b and td.bags[c[0]] == b | {v}
        if not ok:
            return Violation("nice", t, f"node {t} is not a well-formed {k.value} node")
    return None


def make_nice(td: TreeDecomposition, g: Graph) -> NiceTreeDecomposition:
    """Nice decomposition of the same width whose root bag equals td's root bag."""
    bad = validate(td, g)
    if bad:
        raise ValueError(f"invalid decomposition: {bad}")
    ch = td.children()
    bags: dict[int, frozenset[int]] = {}
    kids: dict[int, list[int]] = {}
    kind: dict[int, Kind] = {}
    vert: dict[int, int] = {}

    def new(bag, k, children, v=None):
        i = len(bags)
        bags[i] = frozenset(bag)
        kids[i] = children
        kind[i] = k
        if v is not None:
            vert[i] = v
        return i

    def chain_down(bag: frozenset[int]) -> int:
        vs = sorted(bag)
        if not vs:
            raise ValueError("empty leaf bag")
        cur = new({vs[0]}, Kind.LEAF, [])
        acc = {vs[0]}
        for v in vs[1:]:
            acc.add(v)
            cur = new(acc, Kind.INTRODUCE, [cur], v)
        return cur

    def bridge(sub: int, top: frozenset[int]) -> int:
        cur = sub
        acc = set(bags[sub])
        for v in sorted(acc - top):
            acc.discard(v)
            cur = new(acc, Kind.FORGET, [cur], v)
        for v in sorted(top - acc):
            acc.add(v)
            cur = new(acc, Kind.INTRODUCE, [cur], v)
        return cur

    def build(t: int) -> int:
        b = td.bags[t]
        if not ch[t]:
            return chain_down(b)
        tops = [bridge(build(c), b) for c in ch[t]]
        acc = tops[0]
        for other in tops[1:]:
            acc = new(b, Kind.JOIN, [acc, other])
        return acc

    top = build(td.root)
    # renumber in preorder from the root for stable ids
    order, stack = [], [top]
    while stack:
        x = stack.pop()
        order.append(x)
        stack.extend(reversed(kids[x]))
    ren = {x: i for i, x in enumerate(order)}
    parent: dict[int, int | None] = {0: None}
    for x in order:
        for c in kids[x]:
            parent[ren[c]] = ren[x]
    return NiceTreeDecomposition(
        {ren[x]: bags[x] for x in order},
        parent,
        0,
        exact=td.exact,
        kind={ren[x]: kind[x] for x in order},
        vertex={ren[x]: v for x, v in vert.items()},
    )


# -- construction --------------------------------------------------------------


def _union_masks(masks: list[int], x: int) -> int:
    out = 0
    while x:
        low = x & -x
        out |= masks[low.bit_length() - 1]
        x ^= low
    return out


def _q(masks: list[int], s: int, v: int) -> int:
    """Vertices outside s+v reachable from v through s."""
    comp = 1 << v
    frontier = comp
    while frontier:
        frontier = _union_masks(masks, frontier) & s & ~comp
        comp |= frontier
    return _union_masks(masks, comp) & ~comp & ~s


def _min_fill_order(masks: list[int], free: int) -> list[int]:
    adj = list(masks)
    order = []
    rest = free
    while rest:
        best = None
        x = rest
        while x:
            low = x & -x
            v = low.bit_length() - 1
            x ^= low
            nb = adj[v]
            fill = 0
            y = nb
            while y:
                lw = y & -y
                u = lw.bit_length() - 1
                y ^= lw
                fill += (nb & ~adj[u] & ~(1 << u)).bit_count()
            key = (fill, nb.bit_count(), v)
            if best is None or key < best:
                best = key
        v = best[2]
        nb = adj[v]
        y = nb
        while y:
            lw = y & -y
            u = lw.bit_length() - 1
            y ^= lw
            adj[u] |= nb & ~(1 << u)
            adj[u] &= ~(1 << v)
        adj[v] = 0
        rest &= ~(1 << v)
        order.append(v)
    return order


def _order_width(masks: list[int], order: list[int]) -> int:
    s = 0
    w = -1
    for v in order:
        w = max(w, _q(masks, s, v).bit_count())
        s |= 1 << v
    return w


def _exact_order(masks: list[int], free: int, w: int) -> list[int] | None:
    """An elimination order of ``free`` with every |Q| <= w, or None."""
    failed: set[int] = set()

    def rec(s: int) -> list[int] | None:
        rest = free & ~s
        if not rest:
            return []
        if s in failed:
            return None
        x = rest
        while x:
            low = x & -x
            v = low.bit_length() - 1
            x ^= low
            if _q(masks, s, v).bit_count() <= w:
                tail = rec(s | low)
                if tail is not None:
                    return [v] + tail
        failed.add(s)
        return None

    return rec(0)


def elimination_order(g: Graph, last: Iterable[int] = (), exact: bool | None = None):
    """Return (order of dense indices, width, exact flag); ``last`` is eliminated last."""
    order_ids, index, masks = g.bitmasks
    masks = list(masks)
    lastset = sorted(index[v] for v in last)
    for a in lastset:
        for b in lastset:
            if a != b:
                masks[a] |= 1 << b
    lm = sum(1 << i for i in lastset)
    free = ((1 << g.n) - 1) & ~lm
    heur = _min_fill_order(masks, free)
    ub = max(_order_width(masks, heur), len(lastset) - 1)
    use_exact = g.n <= EXACT_CAP if exact is None else exact
    order, width = heur, ub
    if use_exact:
        lb = max(len(lastset) - 1, 1 if g.m else 0)
        for w in range(lb, ub):
            o = _exact_order(masks, free, w)
            if o is not None:
                order, width = o, max(w, len(lastset) - 1)
                break
    return order + lastset, width, use_exact


def decompose(
    g: Graph,
    width_budget: int | None = None,
    *,
    root_bag: Iterable[int] = (),
    exact: bool | None = None,
) -> TreeDecomposition | None:
    """Tree decomposition of g (exact treewidth up to EXACT_CAP vertices).

    With ``root_bag`` the root bag is exactly that set.  Returns None when
    the width exceeds ``width_budget``; in heuristic mode that answer is
    inconclusive and ``exact`` on a returned decomposition is False.
    """
    if g.n == 0:
        return None
    root_set = frozenset(root_bag)
    order, width, was_exact = elimination_order(g, root_set, exact)
    if width_budget is not None and width > width_budget:
        return None
    ids, index, masks = g.bitmasks
    masks = list(masks)
    rl = [index[v] for v in root_set]
    for a in rl:
        for b in rl:
            if a != b:
                masks[a] |= 1 << b
    pos = {v: i for i, v in enumerate(order)}
    bags: dict[int, frozenset[int]] = {}
    parent: dict[int, int | None] = {}
    s = 0
    nonroot = len(order) - len(rl)
    for v in order[:nonroot]:
        q = _q(masks, s, v)
        later = [u for u in range(g.n) if q >> u & 1]
        bags[v] = frozenset([ids[v]] + [ids[u] for u in later])
        parent[v] = min(later, key=pos.__getitem__) if later else None
        s |= 1 << v
    if rl:
        top = -1
        bags[top] = root_set
        parent[top] = None
        for v in list(parent):
            p = parent[v]
            if p is not None and p in rl:
                parent[v] = top
    else:
        top = order[-1]
    for v in list(parent):
        if parent[v] is None and v != top:
            parent[v] = top
    # stable node ids 0..N-1 with the root at 0
    nodes = sorted(bags, key=lambda t: (t != top, t))
    ren = {t: i for i, t in enumerate(nodes)}
    return TreeDecomposition(
        {ren[t]: bags[t] for t in nodes},
        {ren[t]: (None if parent[t] is None else ren[parent[t]]) for t in nodes},
        0,
        exact=was_exact,
    )


def treewidth(g: Graph) -> int:
    return elimination_order(g, (), True)[1] if g.n else -1


# -- PACE-style text format -------------------------------------------------


def format_td(td: TreeDecomposition, n: int) -> str:
    nodes = sorted(td.bags)
    ren = {t: i + 1 for i, t in enumerate(nodes)}
    nice = isinstance(td, NiceTreeDecomposition)
    lines = [f"s td {len(nodes)} {td.width + 1} {n}"]
    for t in nodes:
        vs = " ".join(map(str, sorted(td.bags[t])))
        if nice:
            k = td.kind[t]
            tag = k.value + (f":{td.vertex[t]}" if t in td.vertex else "")
            lines.append(f"b {ren[t]} {tag} {vs}".rstrip())
        else:
            lines.append(f"b {ren[t]} {vs}".rstrip())
    for t in nodes:
        p = td.parent[t]
        if p is not None:
            lines.append(f"{ren[p]} {ren[t]}")
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    """Parse the PACE-style format; the first bag is taken as the root."""
    bags: dict[int, list[int]] = {}
    kinds: dict[int, tuple[Kind, int | None]] = {}
    edges = []
    header = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            header = parts
        elif parts[0] == "b":
            t = int(parts[1])
            rest = parts[2:]
            if rest and not rest[0].isdigit():
                name, _, v = rest[0].partition(":")
                kinds[t] = (Kind(name), int(v) if v else None)
                rest = rest[1:]
            bags[t] = [int(x) for x in rest]
        else:
            edges.append((int(parts[0]), int(parts[1])))
    if header is None or len(header) != 5 or header[1] != "td":
        raise ValueError("missing 's td' header")
    if int(header[2]) != len(bags):
        raise ValueError("bag count does not match header")
    root = min(bags)
    td = TreeDecomposition.from_edges(bags, edges, root)
    if kinds:
        return NiceTreeDecomposition(
            td.bags,
            td.parent,
            root,
            kind={t: k for t, (k, _) in kinds.items()},
            vertex={t: v for t, (_, v) in kinds.items() if v is not None},
        )
    return td
