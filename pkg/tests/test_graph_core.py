from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given

from strategies import connected_graphs
from subspec.graph_core import (BipartiteGraph, GraphError, MarkovRelationError, a_infinity, a_two_sided,
                                boundary, d_infinity, exact_sqrt, is_connected, transpose)


def test_rejects_bad_matrices():
    with pytest.raises(GraphError):
        BipartiteGraph.from_matrix([[1, 0], [0, 0]])
    with pytest.raises(GraphError):
        BipartiteGraph.from_matrix([[1, -1]])
    with pytest.raises(GraphError):
        BipartiteGraph(("a",), ("a",), ((1,),))
    with pytest.raises(OverflowError):
        BipartiteGraph.from_matrix([[2**31]])


def test_components_of_disjoint_union():
    g = BipartiteGraph.from_matrix([[1, 0], [0, 1]])
    assert not is_connected(g)
    assert len(g.components()) == 2


@given(connected_graphs())
def test_transpose_is_an_involution(g):
    assert transpose(transpose(g)) == g
    assert transpose(g).shape == g.shape[::-1]


@given(connected_graphs())
def test_gram_matrices_are_symmetric(g):
    for gram in (g.gram_even(), g.gram_odd()):
        assert all(gram[a][b] == gram[b][a] for a in range(len(gram)) for b in range(len(gram)))


def test_boundary_of_path_prefix():
    g = a_infinity(4)
    assert boundary(g, range(5)) == frozenset({5})
    assert boundary(g, [0]) == frozenset({1})


def test_a_infinity_weights_at_index_four():
    g = a_infinity(4)
    assert [g.weight(k) for k in range(6)] == [1, 3, 5, 7, 9, 11]
    g.check_markov(range(50))


def test_a_infinity_needs_index_at_least_four():
    with pytest.raises(GraphError):
        a_infinity(Fraction(7, 2))


def test_two_sided_weights_are_geometric():
    g = a_two_sided(Fraction(100, 21))
    assert g.weight(1) == Fraction(7, 3)
    assert g.weight(-2) == Fraction(9, 49)
    g.check_markov(range(-10, 10))


def test_d_infinity_is_markov():
    g = d_infinity(Fraction(9, 2))
    g.check_markov([-1, 0, 1, 2, 3, 4, 5])
    assert g.weight(-1) == g.weight(0) == 1


def test_markov_check_catches_wrong_index():
    g = a_infinity(4)
    bad = type(g)(g.basepoint, g.neighbors, g.weight, Fraction(5))
    with pytest.raises(MarkovRelationError):
        bad.check_markov(range(3))


def test_truncation_interior_masks():
    tr = a_infinity(4).truncate(3)
    assert tr.evens == (0, 1, 2, 3)
    assert tr.even_interior == (True, True, True, False)
    assert tr.odd_interior == (True, True, True, False)
    assert tr.graph.shape == (4, 4)


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(2) is None
