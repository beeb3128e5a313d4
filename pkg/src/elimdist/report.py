"""Characteristic and representative size report (CSV plus figures)."""

from __future__ import annotations

import csv
import io
import random
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from elimdist.boundaried import RepresentativeRegistry  # noqa: E402
from elimdist.elimdp import DpContext, rec_ed  # noqa: E402
from elimdist.graph import Graph, grid_graph  # noqa: E402
from elimdist.minors import ObstructionFamily  # noqa: E402
from elimdist.treedecomp import decompose, make_nice  # noqa: E402
from elimdist.walls import elementary_wall  # noqa: E402


def corpus(n_random: int, seed: int) -> list[tuple[str, Graph]]:
    rng = random.Random(seed)
    out = [("grid3x3", grid_graph(3, 3)), ("wall3", elementary_wall(3).graph)]
    for i in range(n_random):
        n = rng.randint(5, 10)
        p = rng.uniform(0.2, 0.5)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        out.append((f"random{i:02d}", Graph(range(n), edges)))
    return out


def trace_rows(
    name: str, g: Graph, f: ObstructionFamily, k: int, reg: RepresentativeRegistry, threads: int
) -> list[tuple]:
    rows = []
    for ci, comp in enumerate(sorted(g.component_sets(), key=min)):
        h = g.subgraph(comp)
        nice = make_nice(decompose(h), h)
        ctx = DpContext(h, f, k, nice, reg, threads, trace=[])
        rec_ed(ctx)
        for node, kind, bag, entries in sorted(ctx.trace):
            rows.append((name, ci, k, node, kind, bag, entries))
    return rows


def run_report(
    f: ObstructionFamily,
    k_max: int,
    out_dir: str | Path,
    *,
    n_random: int = 20,
    seed: int = 0,
    threads: int = 1,
) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reg = RepresentativeRegistry()
    rows = []
    for name, g in corpus(n_random, seed):
        for k in range(k_max + 1):
            rows.extend(trace_rows(name, g, f, k, reg, threads))

    with open(out / "characteristics.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["graph", "component", "k", "node", "kind", "bag_size", "entries"])
        w.writerows(rows)

    reps = sorted(reg.sizes().items())
    with open(out / "representatives.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "h", "count", "min_size", "max_size"])
        for (t, h), sizes in reps:
            w.writerow([t, h, len(sizes), min(sizes), max(sizes)])

    # largest characteristic per (k, bag size)
    peak: dict[tuple[int, int], int] = defaultdict(int)
    for _, _, k, _, _, bag, entries in rows:
        peak[(k, bag)] = max(peak[(k, bag)], entries)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for k in range(k_max + 1):
        xs = sorted(b for kk, b in peak if kk == k)
        ax.plot(xs, [peak[(k, b)] for b in xs], marker="o", label=f"k={k}")
    ax.set_xlabel("bag size")
    ax.set_ylabel("max characteristic size")
    ax.set_yscale("log")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out / "characteristic_sizes.png", dpi=120, metadata={"Software": None})
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ts = [t for (t, _), _ in reps]
    ax.plot(ts, [max(s) for _, s in reps], marker="s", label="max")
    ax.plot(ts, [min(s) for _, s in reps], marker="^", label="min")
    ax.set_xlabel("boundary size t")
    ax.set_ylabel("representative vertices")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out / "representative_sizes.png", dpi=120, metadata={"Software": None})
    plt.close(fig)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "bag_size", "max_entries"])
    for (k, b), v in sorted(peak.items()):
        w.writerow([k, b, v])
    sys.stdout.write(buf.getvalue())
    print(f"# representatives: {len(reg)} classes; files in {out}")
