"""Elimination forests and their text format.

Format: one line per node, ``t <id> <parent or -> <vertex ...>``; ``#``
starts a comment.  Heights follow the convention that a leaf has height 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class EliminationForest:
    """``parent[node]`` is None for roots; ``chi[node]`` is the node's vertex set."""

    parent: dict[int, int | None]
    chi: dict[int, frozenset[int]]

    def children(self) -> dict[int, list[int]]:
        ch: dict[int, list[int]] = {t: [] for t in self.parent}
        for t, p in sorted(self.parent.items()):
            if p is not None:
                ch[p].append(t)
        return ch

    @property
    def roots(self) -> list[int]:
        return sorted(t for t, p in self.parent.items() if p is None)

    def leaves(self) -> list[int]:
        ch = self.children()
        return sorted(t for t in self.parent if not ch[t])

    def internal(self) -> list[int]:
        ch = self.children()
        return sorted(t for t in self.parent if ch[t])

    def elimination_set(self) -> frozenset[int]:
        return frozenset(v for t in self.internal() for v in self.chi[t])

    def heights(self) -> dict[int, int]:
        ch = self.children()
        out: dict[int, int] = {}

        def rec(t: int) -> int:
            out[t] = 1 + max(map(rec, ch[t])) if ch[t] else 0
            return out[t]

        for r in self.roots:
            rec(r)
        return out

    @property
    def height(self) -> int:
        return max(self.heights().values(), default=0)

    def subtree(self, t: int) -> set[int]:
        ch = self.children()
        out, stack = set(), [t]
        while stack:
            x = stack.pop()
            out |= self.chi[x]
            stack.extend(ch[x])
        return out


def format_forest(ef: EliminationForest) -> str:
    lines = [f"# elimination forest, height {ef.height}"]
    for t in sorted(ef.parent):
        p = ef.parent[t]
        vs = " ".join(map(str, sorted(ef.chi[t])))
        lines.append(f"t {t} {'-' if p is None else p} {vs}".rstrip())
    return "\n".join(lines) + "\n"


def parse_forest(text: str) -> EliminationForest:
    parent: dict[int, int | None] = {}
    chi: dict[int, frozenset[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "t" or len(parts) < 3:
            raise ValueError(f"line {lineno}: expected 't <id> <parent> <vertices>'")
        try:
            t = int(parts[1])
            p = None if parts[2] == "-" else int(parts[2])
            vs = frozenset(int(x) for x in parts[3:])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field in {raw!r}") from None
        if t in parent:
            raise ValueError(f"line {lineno}: duplicate node {t}")
        parent[t] = p
        chi[t] = vs
    for t, p in parent.items():
        if p is not None and p not in parent:
            raise ValueError(f"node {t} has unknown parent {p}")
    return EliminationForest(parent, chi)


def read_forest(path: str | Path) -> EliminationForest:
    return parse_forest(Path(path).read_text())


def write_forest(ef: EliminationForest, path: str | Path) -> None:
    Path(path).write_text(format_forest(ef))
