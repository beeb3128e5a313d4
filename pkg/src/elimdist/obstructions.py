"""Brute-force enumeration of minor-minimal graphs outside E_k(exc(F)).

E_k is minor-closed, so a graph is minor-minimal outside it exactly when
every single vertex deletion, edge deletion and edge contraction lands
back inside.  Only graphs up to a user-set vertex cap are searched.
"""

from __future__ import annotations

import json
from collections.abc import Iterator
from pathlib import Path

from elimdist.canon import canonical_form, canonical_graph
from elimdist.graph import Graph
from elimdist.io import format_edge_list
from elimdist.minors import ObstructionFamily, ResourceLimitExceeded
from elimdist.oracles import ed_oracle

ENUM_CAP = 8

_levels: list[list[Graph]] = [[Graph()]]


def _level(n: int) -> list[Graph]:
    """Canonical representatives of all graphs on exactly n vertices, sorted by code."""
    while len(_levels) <= n:
        prev = _levels[-1]
        m = len(_levels) - 1
        found: dict[bytes, Graph] = {}
        for g in prev:
            for mask in range(1 << m):
                nb = [u for u in range(m) if mask >> u & 1]
                h = g.add_vertex(m, nb)
                code = canonical_form(h)
                if code not in found:
                    found[code] = canonical_graph(h)
        _levels.append([found[c] for c in sorted(found)])
    return _levels[n]


def enumerate_graphs(n_max: int, include_empty: bool = False) -> Iterator[Graph]:
    """One graph per isomorphism class with at most n_max vertices, smallest first.

    The graph with no vertices is skipped unless include_empty is set.
    """
    if n_max > ENUM_CAP:
        raise ResourceLimitExceeded(f"enumeration cap is {ENUM_CAP} vertices, got {n_max}")
    for n in range(0 if include_empty else 1, n_max + 1):
        yield from _level(n)


def one_step_minors(g: Graph) -> Iterator[Graph]:
    for v in g.vertices:
        yield g.delete_vertices([v])
    for u, v in g.sorted_edges():
        yield g.delete_edge(u, v)
        yield g.contract_edge(u, v)


def find_obstructions(f: ObstructionFamily, k: int, n_max: int) -> list[Graph]:
    """Graphs with ed > k whose one-step minors all have ed <= k, in canonical form."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = []
    for g in enumerate_graphs(n_max):
        if ed_oracle(g, f) <= k:
            continue
        if all(ed_oracle(h, f) <= k for h in one_step_minors(g)):
            out.append(g)
    out.sort(key=lambda g: (g.n, g.m, canonical_form(g)))
    return out


def manifest(obs: list[Graph], f: ObstructionFamily, k: int, n_max: int) -> dict:
    return {
        "F": str(f),
        "k": k,
        "n_max": n_max,
        "count": len(obs),
        "codes": [canonical_form(g).hex() for g in obs],
    }


def format_obstructions(obs: list[Graph]) -> str:
    blocks = []
    for i, g in enumerate(obs, 1):
        blocks.append(f"# obstruction {i}: n={g.n} m={g.m}\n" + format_edge_list(g))
    return "".join(blocks)


def write_obstructions(
    obs: list[Graph], out_dir: str | Path, f: ObstructionFamily, k: int, n_max: int
) -> Path:
    """Write ``obs_<i>.el`` files and ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, g in enumerate(obs, 1):
        (out / f"obs_{i:03d}.el").write_text(format_edge_list(g))
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest(obs, f, k, n_max), indent=2, sort_keys=True) + "\n")
    return path
