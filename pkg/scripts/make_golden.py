"""Regenerate tests/data/golden_obs_K2_k1_n5.json from the brute-force oracle.

Usage: python3 scripts/make_golden.py [--check]
"""

import argparse
import json
import sys
from pathlib import Path

from elimdist.minors import preset
from elimdist.obstructions import find_obstructions, manifest

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden_obs_K2_k1_n5.json"


def build() -> dict:
    f = preset("K2")
    obs = find_obstructions(f, 1, 5)
    data = manifest(obs, f, 1, 5)
    data["graphs"] = [{"n": g.n, "edges": [list(e) for e in g.sorted_edges()]} for g in obs]
    return data


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args()
    text = json.dumps(build(), indent=2, sort_keys=True) + "\n"
    if args.check:
        same = OUT.exists() and OUT.read_text() == text
        print("golden list up to date" if same else "golden list differs")
        return 0 if same else 1
    OUT.write_text(text)
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
