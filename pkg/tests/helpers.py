"""Small graph builders shared by the test modules."""

from __future__ import annotations

from subspec.graph_core import BipartiteGraph


def tree_graph(edges, n: int) -> BipartiteGraph:
    """Bipartite graph of a tree (or any connected bipartite graph) on ``0..n-1``."""
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    colour = {0: 0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in colour:
                colour[u] = 1 - colour[v]
                stack.append(u)
    odd = [v for v in range(n) if colour[v] == 0]
    even = [v for v in range(n) if colour[v] == 1]
    mult = tuple(tuple(1 if b in adj[a] else 0 for b in even) for a in odd)
    return BipartiteGraph(tuple(f"v{a}" for a in odd), tuple(f"v{b}" for b in even), mult)


def path(n: int) -> BipartiteGraph:
    """``A_n``: the path on ``n >= 2`` vertices."""
    return tree_graph([(k, k + 1) for k in range(n - 1)], n)


def star_tree(arms) -> BipartiteGraph:
    """Arms of the given lengths glued at a centre vertex."""
    edges, nxt = [], 1
    for length in arms:
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return tree_graph(edges, nxt)


def d_graph(n: int) -> BipartiteGraph:
    return star_tree([1, 1, n - 3])


def e_graph(n: int) -> BipartiteGraph:
    return star_tree([1, 2, n - 4])
