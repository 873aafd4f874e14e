"""Enumerate graphs up to a vertex bound and append new norm values to the atlas.

usage: python scripts/build_atlas.py [--max-vertices 10] [--max-multiplicity 1] [--atlas PATH]
"""

import argparse
import time

from subspec.espec import Atlas, classify, enumerate_graphs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-vertices", type=int, default=10)
    ap.add_argument("--max-multiplicity", type=int, default=1)
    ap.add_argument("--atlas", default=None, help="JSON-lines file (default: user cache)")
    args = ap.parse_args()

    t0 = time.perf_counter()
    res = enumerate_graphs(args.max_vertices, args.max_multiplicity)
    entries = classify(res)
    atlas = Atlas(args.atlas)
    written = atlas.extend(entries)
    print(f"{len(res)} graphs, {len(entries)} distinct norms, {written} new -> {atlas.path}"
          f" ({time.perf_counter() - t0:.1f}s)")
    for e in entries:
        if e.norm_squared < 4.3:
            print(f"  {e.norm_squared:.9f}  {e.cls:8s}  {e.label or '':5s}  graphs={e.multiplicity}")


if __name__ == "__main__":
    main()
