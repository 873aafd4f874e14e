"""Write the sample graph, scene and cell files under data/.

usage: python scripts/make_sample_inputs.py [outdir]
"""

import json
import sys
from importlib import resources
from pathlib import Path

from subspec.graph_core import BipartiteGraph
from subspec.io import serialize_graph


def tree_graph(edges, n):
    """Bipartite graph of a tree on vertices 0..n-1 (vertex 0 is odd)."""
    colour = {0: 0}
    stack = [0]
    adj = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in colour:
                colour[u] = 1 - colour[v]
                stack.append(u)
    odd = [v for v in range(n) if colour[v] == 0]
    even = [v for v in range(n) if colour[v] == 1]
    mult = [[1 if b in adj[a] else 0 for b in even] for a in odd]
    return BipartiteGraph(tuple(f"v{a}" for a in odd), tuple(f"v{b}" for b in even),
                          tuple(tuple(r) for r in mult))


def t_tree(arms):
    """Star-like tree: arms of the given lengths joined at vertex 0."""
    edges, nxt = [], 1
    for length in arms:
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return tree_graph(edges, nxt)


def a_inf_truncation(last: int):
    """Evens 0..last of the half line; odd k joins evens k and k+1; weights 2k+1 at index 4."""
    odd = [f"o{k}" for k in range(last)]
    even = [str(k) for k in range(last + 1)]
    mult = [[1 if j in (k, k + 1) else 0 for j in range(last + 1)] for k in range(last)]
    g = BipartiteGraph(tuple(odd), tuple(even), tuple(tuple(r) for r in mult))
    return g, [2 * k + 1 for k in range(last + 1)]


def scene(name, n, mats):
    return {"name": name, "ambient": {"block_sizes": [n], "trace_weights": [f"1/{n}"]},
            "subalgebras": {"B": mats}}


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "data"
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    (out / "scenes").mkdir(parents=True, exist_ok=True)
    files = {
        "graphs/e10.json": serialize_graph(t_tree([1, 2, 6])),
        "graphs/e8.json": serialize_graph(t_tree([1, 2, 4])),
        "graphs/a4.json": serialize_graph(BipartiteGraph.from_matrix([[1, 1], [0, 1]])),
        "graphs/spin_row.json": serialize_graph(BipartiteGraph.from_matrix([[1, 1]]), (1, 1), 2),
    }
    # the truncation is not Markov at its last vertex; the file still carries the true weights
    g, w = a_inf_truncation(13)
    files["graphs/ainf4.json"] = serialize_graph(g, w, 4)
    eye = [[1, 0], [0, 1]]
    files["scenes/scalars_m2.json"] = json.dumps(scene("scalars in M2", 2, [eye])) + "\n"
    files["scenes/diag_m2.json"] = json.dumps(
        scene("diagonal in M2", 2, [[[1, 0], [0, 0]], [[0, 0], [0, 1]]])) + "\n"
    (out / "cells").mkdir(parents=True, exist_ok=True)
    for name, target in (("spin2", "spin.json"), ("fourier3", "fourier3.json")):
        files[f"cells/{target}"] = resources.files("subspec.data.cells").joinpath(f"{name}.json").read_text()
    for rel, text in files.items():
        (out / rel).write_text(text)
        print(out / rel)


if __name__ == "__main__":
    main()
