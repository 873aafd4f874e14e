from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from helpers import d_graph, e_graph, path, star_tree
from strategies import connected_graphs
from subspec.espec import (Atlas, canonical, classify, classify_norm, dynkin_label, enumerate_graphs,
                           membership_query, with_norm)
from subspec.graph_core import BipartiteGraph, transpose
from subspec.spectral import norm_squared


def permuted(g, rnd):
    r = list(range(g.shape[0]))
    c = list(range(g.shape[1]))
    rnd.shuffle(r)
    rnd.shuffle(c)
    return BipartiteGraph.from_matrix([[g.mult[i][j] for j in c] for i in r])


@given(connected_graphs(), st.integers(0, 10**6))
def test_canonical_form_collides_under_relabeling(g, seed):
    rnd = random.Random(seed)
    h = permuted(g, rnd)
    assert canonical(g).key == canonical(h).key
    assert canonical(g).key == canonical(transpose(h)).key


@given(connected_graphs())
def test_canonical_is_idempotent(g):
    cg = canonical(g)
    assert canonical(cg).key == cg.key


@given(connected_graphs())
def test_canonical_keeps_the_norm(g):
    assert with_norm(canonical(g)).norm_squared == pytest.approx(norm_squared(g), rel=1e-9)


def test_non_isomorphic_graphs_differ():
    assert canonical(d_graph(6)).key != canonical(e_graph(6)).key


@pytest.mark.parametrize("g,cls", [(path(5), "Coxeter"), (star_tree([1, 1, 1, 1]), "Affine"),
                                   (star_tree([1, 2, 5]), "Affine"), (star_tree([1, 2, 6]), "Window"),
                                   (star_tree([1, 1, 1, 1, 1]), "HalfLine"),
                                   (BipartiteGraph.from_matrix([[1, 1, 1, 1, 1, 1]]), "HalfLine")])
def test_norm_classes(g, cls):
    assert classify_norm(with_norm(canonical(g))) == cls


def test_dynkin_labels():
    assert dynkin_label(canonical(path(4))) == "A4"
    assert dynkin_label(canonical(d_graph(5))) == "D5"
    assert dynkin_label(canonical(e_graph(8))) == "E8"
    assert dynkin_label(canonical(star_tree([1, 1, 1, 1]))) is None


def test_enumeration_counts():
    res = enumerate_graphs(8)
    assert [res.counts[n] for n in range(2, 9)] == [1, 1, 3, 5, 17, 44, 182]


def test_enumeration_respects_multiplicity():
    res = enumerate_graphs(3, max_multiplicity=2)
    assert res.counts[2] == 2


def test_classify_dedups_and_picks_smallest_witness():
    atlas = classify(enumerate_graphs(6))
    values = [e.norm_squared for e in atlas]
    assert values == sorted(values)
    assert all(b - a > 1e-9 for a, b in zip(values, values[1:]))
    two = next(e for e in atlas if abs(e.norm_squared - 2) < 1e-9)
    assert two.witness.vertices == 3


def test_atlas_is_append_only(tmp_path):
    atlas = Atlas(tmp_path / "atlas.jsonl")
    entries = classify(enumerate_graphs(5))
    assert atlas.extend(entries) == len(entries)
    assert atlas.extend(entries) == 0
    assert len(atlas.load()) == len(entries)


def test_membership_query():
    hit = membership_query(5.0, max_vertices=7)
    assert hit.found and hit.witness.vertices == 6
    miss = membership_query(3.5, max_vertices=7)
    assert not miss.found and "not a proof" in miss.caveat
