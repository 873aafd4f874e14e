from __future__ import annotations

from fractions import Fraction

import pytest

from helpers import path
from subspec.graph_core import BipartiteGraph, GraphError, a_infinity
from subspec.spectral import markov_weight, verify_markov
from subspec.tower import (MarkovWeightedGraph, basic_construction_step, build_tower, coupling_check,
                           growth_rate, pointed, standard_weights)

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def spin():
    return pointed(BipartiteGraph.from_matrix([[1, 1]]), (1, 1), 2)


def test_a_infinity_tower_is_catalan():
    tw = build_tower(a_infinity(4), 8)
    assert tw.total_dimensions() == CATALAN


def test_spin_towers_in_both_orientations():
    assert build_tower(spin(), 4).total_dimensions() == [1, 1, 2, 4, 8]
    col = pointed(BipartiteGraph.from_matrix([[1], [1]]), (1,), 2)
    assert build_tower(col, 4).total_dimensions() == [1, 2, 4, 8, 16]


@pytest.mark.parametrize("depth", [3, 6])
def test_traces_are_states(depth):
    for m in (spin(), pointed(BipartiteGraph.from_matrix([[2]]), (1,), 4)):
        for lv in build_tower(m, depth).levels:
            assert lv.state_value == 1


def test_exact_traces_stay_exact():
    lv = build_tower(a_infinity(4), 4).levels[4]
    assert all(isinstance(t, Fraction) for t in lv.traces)
    assert lv.state_value == 1


@pytest.mark.parametrize("m", [spin(), pointed(BipartiteGraph.from_matrix([[2]]), (1,), 4)])
def test_growth_rate_tends_to_norm(m):
    est = growth_rate(build_tower(m, 12))
    assert est.rate == pytest.approx(est.norm_squared, rel=0.05)


def test_basic_construction_step_transposes():
    m = markov_weight(path(5))
    up = basic_construction_step(m)
    assert up.graph.mult == tuple(zip(*m.graph.mult))
    assert verify_markov(up.graph, up.weights, up.lambda_inv, 1e-8).passed


def test_non_markov_weights_rejected():
    with pytest.raises(GraphError):
        MarkovWeightedGraph(BipartiteGraph.from_matrix([[1, 1]]), (1, 2), 2)


def test_coupling_check_on_truncation():
    tr = a_infinity(4).truncate(10)
    d_M = list(tr.weights)
    d_N = [sum(r[j] * d_M[j] for j in range(len(d_M))) for r in tr.graph.mult]
    assert coupling_check(tr, d_M, d_N, 4).passed
    assert not coupling_check(tr, d_M, d_N, 5).passed


def test_coupling_check_dimension_mismatch():
    with pytest.raises(GraphError):
        coupling_check(BipartiteGraph.from_matrix([[1, 1]]), [1], [1], 2)


def test_standard_weights_report_both_normalizations():
    sw = standard_weights(path(4))
    assert sw.u_first_index_normalized == pytest.approx(sw.lambda_inv ** 0.5)
    assert len(sw.u) == 2
