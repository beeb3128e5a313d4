"""Edge-list text format.

Lines ``u v`` with non-negative integer ids, ``#`` comments, blank lines
ignored.  An optional header ``n <count>`` declares vertices 0..count-1 so
that isolated vertices survive a round trip.
"""

from __future__ import annotations

from pathlib import Path

from elimdist.graph import Graph


class ParseError(ValueError):
    pass


def parse_edge_list(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or not parts[1].isdigit() or n is not None:
                raise ParseError(f"line {lineno}: bad header {raw!r}")
            n = int(parts[1])
            continue
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise ParseError(f"line {lineno}: self-loop {u}")
        edges.append((u, v))
    return Graph(range(n) if n is not None else (), edges)


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Graph) -> str:
    """Serialize; graphs with isolated vertices are compacted to ids 0..n-1."""
    lines = []
    if any(g.degree(v) == 0 for v in g.vertices):
        if g.vertices != tuple(range(g.n)):
            g = g.compact()
        lines.append(f"n {g.n}")
    lines += [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))
