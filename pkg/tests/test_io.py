from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given

from strategies import connected_graphs
from subspec.io import (InputError, fingerprint, graph_from_json, parse_number, parse_scene_file,
                        serialize_graph)
from subspec.tower import MarkovWeightedGraph


@given(connected_graphs())
def test_graph_round_trip(g):
    text = serialize_graph(g)
    back = graph_from_json(json.loads(text))
    assert back == g
    assert serialize_graph(back) == text


def test_weighted_round_trip_keeps_exact_weights():
    obj = {"odd": ["i0"], "even": ["a", "b"], "edges": [["i0", "a", 1], ["i0", "b", 1]],
           "weights": {"a": "1", "b": "1"}, "lambda_inv": 2}
    g = graph_from_json(obj)
    assert isinstance(g, MarkovWeightedGraph)
    assert json.loads(serialize_graph(g)) == {**obj, "weights": {"a": 1, "b": 1}}


@pytest.mark.parametrize("obj,msg", [
    ({"odd": ["i"], "even": ["j"], "edges": [], "colour": 1}, "unknown key"),
    ({"odd": ["i"], "even": ["j"]}, "missing key"),
    ({"odd": ["i"], "even": ["j"], "edges": [["i", "k", 1]]}, "unknown even label"),
    ({"odd": ["i"], "even": ["j"], "edges": [["i", "j", -1]]}, "nonnegative"),
    ({"odd": ["i"], "even": ["j"], "edges": [["i", "j", 1]], "lambda_inv": 1}, "without 'weights'"),
    ({"odd": ["i"], "even": ["j"], "edges": [["i", "j", 1]], "weights": {"j": 0}}, "positive"),
])
def test_graph_schema_errors(obj, msg):
    with pytest.raises(InputError, match=msg):
        graph_from_json(obj)


def test_parse_number():
    assert parse_number("3/10", "x") == Fraction(3, 10)
    assert parse_number("0.21", "x") == Fraction(21, 100)
    assert parse_number(4, "x") == 4
    with pytest.raises(InputError):
        parse_number("abc", "x")


def test_fingerprint_is_stable():
    assert fingerprint("abc") == fingerprint(b"abc")
    assert len(fingerprint("abc")) == 64


def test_scene_entries(tmp_path):
    scene = {"name": "s", "ambient": {"block_sizes": [2], "trace_weights": ["1/2"]},
             "subalgebras": {"B": [[[1, 0], [0, [1, 0]]]]}}
    p = tmp_path / "scene.json"
    p.write_text(json.dumps(scene))
    out = parse_scene_file(str(p))
    assert out["subalgebras"]["B"].dim == 1
    scene["subalgebras"]["X"] = scene["subalgebras"].pop("B")
    p.write_text(json.dumps(scene))
    with pytest.raises(InputError):
        parse_scene_file(str(p))
