"""Command-line entry point: ``elimdist {ed,obs,gen,check,report}``.

Exit codes: 0 success, 1 infeasible or invalid, 2 bad input, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from elimdist.forest import parse_forest, write_forest
from elimdist.graph import Graph, grid_graph
from elimdist.io import ParseError, format_edge_list, read_edge_list
from elimdist.minors import ResourceLimitExceeded, family_from_spec

EXIT_INFEASIBLE = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3


class InputError(Exception):
    pass


def _family(spec: str):
    try:
        return family_from_spec(spec)
    except ValueError as e:
        raise InputError(str(e)) from None


def _graph(path: str) -> Graph:
    try:
        return read_edge_list(path)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None


def _vertex_list(path: str) -> list[int]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    out = []
    for tok in _tokens(text):
        if not tok.isdigit():
            raise InputError(f"{path}: expected vertex ids, got {tok!r}")
        out.append(int(tok))
    return out


def _tokens(text: str) -> list[str]:
    return [t for line in text.splitlines() for t in line.split("#", 1)[0].split()]


# -- subcommands -------------------------------------------------------------------


def cmd_ed(args) -> int:
    from elimdist.elimdp import Infeasible, annotated_ed, compute_ed, extract_forest
    from elimdist.oracles import ed_oracle, validate_forest

    g = _graph(args.graph)
    f = _family(args.family)
    if args.k < 0:
        raise InputError("--k must be non-negative")
    if args.annotate:
        s0 = _vertex_list(args.annotate)
        try:
            val = annotated_ed(g, s0, f, args.k, threads=args.threads)
        except ValueError as e:
            if isinstance(e, Infeasible):
                val = None
            else:
                raise InputError(str(e)) from None
        label = "annotated ed"
    elif args.oracle:
        v = ed_oracle(g, f)
        val = v if v <= args.k else None
        label = "ed"
    else:
        val = compute_ed(g, f, args.k, threads=args.threads)
        label = "ed"
    if val is None:
        print(f"{label} > {args.k}")
        return EXIT_INFEASIBLE
    print(f"{label} = {val}")
    if args.forest and not args.annotate:
        try:
            ef = extract_forest(g, f, args.k, threads=args.threads)
        except Infeasible:
            return EXIT_INFEASIBLE
        bad = validate_forest(g, f, ef)
        if bad is not None:
            print(f"internal error: extracted forest is invalid: {bad}", file=sys.stderr)
            return EXIT_INFEASIBLE
        write_forest(ef, args.forest)
        print(f"forest written to {args.forest} (height {ef.height})")
    return 0


def cmd_obs(args) -> int:
    from elimdist.obstructions import (
        find_obstructions,
        format_obstructions,
        manifest,
        write_obstructions,
    )

    f = _family(args.family)
    if args.k < 0 or args.nmax < 0:
        raise InputError("--k and --nmax must be non-negative")
    obs = find_obstructions(f, args.k, args.nmax)
    sys.stdout.write(format_obstructions(obs))
    print("# manifest " + json.dumps(manifest(obs, f, args.k, args.nmax), sort_keys=True))
    if args.out:
        write_obstructions(obs, args.out, f, args.k, args.nmax)
    return 0


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(range(n), edges)


def cmd_gen(args) -> int:
    from elimdist.walls import WallError, elementary_wall

    if args.kind == "wall":
        try:
            g = elementary_wall(args.r).graph
        except WallError as e:
            raise InputError(str(e)) from None
        head = f"# elementary wall r={args.r}"
    elif args.kind == "grid":
        if args.k < 1 or args.r < 1:
            raise InputError("grid sides must be positive")
        g = grid_graph(args.k, args.r)
        head = f"# grid {args.k}x{args.r}"
    else:
        if args.n < 0 or not 0 <= args.p <= 1:
            raise InputError("need n >= 0 and 0 <= p <= 1")
        g = random_graph(args.n, args.p, args.seed)
        head = f"# random n={args.n} p={args.p} seed={args.seed}"
    text = head + "\n" + format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args) -> int:
    from elimdist.oracles import validate_forest

    g = _graph(args.graph)
    f = _family(args.family)
    try:
        ef = parse_forest(Path(args.forest).read_text())
    except OSError as e:
        raise InputError(f"cannot read {args.forest}: {e.strerror}") from None
    except ValueError as e:
        raise InputError(f"{args.forest}: {e}") from None
    bad = validate_forest(g, f, ef)
    if bad is None:
        print(f"ok (height {ef.height})")
        return 0
    print(f"violation {bad.kind}: {bad.message}")
    return EXIT_INFEASIBLE


def cmd_report(args) -> int:
    from elimdist.report import run_report

    f = _family(args.family)
    run_report(f, args.k, args.out, n_random=args.random, seed=args.seed, threads=args.threads)
    return 0


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="elimdist",
        description="Elimination distance to minor-closed classes.",
        epilog="Heights count edges: a forest made of one leaf has height 0.",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    e = sub.add_parser("ed", help="compute the elimination distance of a graph")
    e.add_argument("graph", help="edge-list file")
    e.add_argument("--family", "-F", required=True, help="preset (K1..K5, P3, C4, planar) or edge-list files")
    e.add_argument("--k", type=int, default=3, help="height budget (default 3)")
    e.add_argument("--annotate", metavar="FILE", help="file listing the annotated vertex set")
    e.add_argument("--forest", metavar="OUT", help="write a minimum-height elimination forest")
    e.add_argument("--oracle", action="store_true", help="use the brute-force oracle")
    e.add_argument("--threads", type=int, default=1)
    e.set_defaults(func=cmd_ed)

    o = sub.add_parser("obs", help="enumerate obstructions of E_k(exc(F))")
    o.add_argument("--family", "-F", required=True)
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--nmax", type=int, required=True, help="vertex cap (at most 8)")
    o.add_argument("--out", metavar="DIR", help="also write obs_*.el files and manifest.json")
    o.set_defaults(func=cmd_obs)

    g = sub.add_parser("gen", help="generate test graphs as edge lists")
    g.add_argument("kind", choices=["wall", "grid", "random"])
    g.add_argument("--r", type=int, default=3, help="wall height, or grid columns")
    g.add_argument("--k", type=int, default=3, help="grid rows")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--p", type=float, default=0.3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", metavar="FILE")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="validate an elimination forest")
    c.add_argument("graph")
    c.add_argument("forest")
    c.add_argument("--family", "-F", required=True)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("report", help="CSV and figures of characteristic and representative sizes")
    r.add_argument("--family", "-F", default="K3")
    r.add_argument("--k", type=int, default=2)
    r.add_argument("--out", default="report", metavar="DIR")
    r.add_argument("--random", type=int, default=20, help="number of random graphs")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--threads", type=int, default=1)
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitExceeded as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
