"""Hypothesis strategies for bipartite graphs."""

from __future__ import annotations

from hypothesis import assume, strategies as st

from subspec.graph_core import BipartiteGraph, GraphError, is_connected


@st.composite
def matrices(draw, max_side: int = 5, max_mult: int = 2):
    r = draw(st.integers(1, max_side))
    c = draw(st.integers(1, max_side))
    return [[draw(st.integers(0, max_mult)) for _ in range(c)] for _ in range(r)]


@st.composite
def connected_graphs(draw, max_side: int = 5, max_mult: int = 2):
    mat = draw(matrices(max_side, max_mult))
    try:
        g = BipartiteGraph.from_matrix(mat)
    except GraphError:
        assume(False)
    assume(is_connected(g))
    return g
