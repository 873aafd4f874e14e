from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import d_graph, e_graph, path, star_tree
from strategies import connected_graphs
from subspec import exact
from subspec.graph_core import BipartiteGraph, transpose
from subspec.spectral import (ReducibleMatrixError, coxeter_value, fast_norm_squared, jones_spectrum_member,
                              markov_weight, norm_report, norm_squared, perron, verify_markov)


def test_perron_on_periodic_matrix():
    A = np.array([[0, 1], [1, 0]], float)
    res = perron(A)
    assert res.eigenvalue == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(res.vector, [1, 1])


def test_perron_rejects_reducible():
    with pytest.raises(ReducibleMatrixError):
        perron(np.eye(2))


@given(connected_graphs())
def test_norm_is_transpose_invariant(g):
    assert norm_squared(g) == pytest.approx(norm_squared(transpose(g)), rel=1e-10)


@given(connected_graphs())
def test_norm_matches_dense_solver(g):
    assert norm_squared(g) == pytest.approx(fast_norm_squared(g), rel=1e-9, abs=1e-9)


@given(connected_graphs(), st.integers(0, 4), st.integers(0, 4))
def test_norm_monotone_in_entries(g, i, j):
    i, j = i % g.shape[0], j % g.shape[1]
    mult = [list(r) for r in g.mult]
    mult[i][j] += 1
    bigger = BipartiteGraph.from_matrix(mult)
    assert norm_squared(bigger) >= norm_squared(g) - 1e-12


def test_reducible_graph_reports_components():
    rep = norm_report(BipartiteGraph.from_matrix([[1, 0], [0, 2]]))
    assert rep.reducible
    assert sorted(rep.component_norms) == pytest.approx([1.0, 4.0])
    assert rep.norm_squared == pytest.approx(4.0)


@pytest.mark.parametrize("g,value", [
    (d_graph(5), 4 * math.cos(math.pi / 8) ** 2),
    (e_graph(6), 4 * math.cos(math.pi / 12) ** 2),
    (e_graph(7), 4 * math.cos(math.pi / 18) ** 2),
    (e_graph(8), 4 * math.cos(math.pi / 30) ** 2),
    (star_tree([1, 1, 1, 1]), 4.0),
])
def test_known_dynkin_norms(g, value):
    rep = norm_report(g)
    assert rep.certified
    assert rep.norm_squared == pytest.approx(value, abs=1e-12)


def test_e10_root_isolated_exactly():
    g = star_tree([1, 2, 6])
    n_odd, n_even = g.shape
    p = exact.charpoly(g.gram_odd() if n_odd <= n_even else g.gram_even())
    lo, hi = exact.isolate_largest_root(p)
    assert lo <= norm_squared(g) <= hi
    assert float(hi - lo) < 1e-11


def test_markov_weight_of_a4():
    m = markov_weight(path(4))
    golden = (1 + math.sqrt(5)) / 2
    assert m.lambda_inv == pytest.approx(golden ** 2)
    assert verify_markov(m.graph, m.weights, m.lambda_inv).passed


def test_verify_markov_exact_mode():
    g = BipartiteGraph.from_matrix([[1, 1]])
    assert verify_markov(g, [1, 1], 2).residual == 0
    assert not verify_markov(g, [1, 2], 2).passed


@pytest.mark.parametrize("alpha,tag", [(4.0, "Four"), (4.5, "Continuum"), (2.0, "CoxeterValue"),
                                       (3.5, "NotInSpectrum")])
def test_spectrum_membership(alpha, tag):
    assert jones_spectrum_member(alpha).tag == tag


def test_coxeter_witness():
    assert jones_spectrum_member(coxeter_value(7)).witness_n == 7
