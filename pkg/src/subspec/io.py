"""JSON file formats: graph files, algebra scenes and Markov cells."""

from __future__ import annotations

import hashlib
import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from .graph_core import BipartiteGraph, GraphError, WeightedGraph

GRAPH_KEYS = ("odd", "even", "edges", "weights", "lambda_inv")
SCENE_KEYS = ("name", "ambient", "subalgebras", "lambda_inv")
SCENE_ROLES = ("M", "N", "P", "Q", "B", "P00", "P01", "P10", "P11")


class InputError(ValueError):
    """Malformed input file; the message names the offending field."""


def fingerprint(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def _load_json(source) -> tuple[object, bytes]:
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        path = Path(source)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
    elif isinstance(source, bytes):
        raw = source
    else:
        raw = str(source).encode()
    try:
        return json.loads(raw), raw
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def parse_number(x, where: str):
    """JSON number or a string holding a rational ``p/q`` or decimal literal."""
    if isinstance(x, bool):
        raise InputError(f"{where}: expected a number, got a boolean")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{where}: cannot parse number {x!r}") from None
    raise InputError(f"{where}: expected a number, got {type(x).__name__}")


def format_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


# ---------------------------------------------------------------------------
# graph files


def graph_from_json(obj) -> BipartiteGraph | WeightedGraph:
    """Build a graph from the decoded graph-file schema.

    With ``weights`` and ``lambda_inv`` the result is a Markov weighted graph
    when the relation holds (basepoint: first even vertex of weight 1, else
    the first even vertex after renormalization) and a plain weighted graph
    otherwise, e.g. for a finite truncation of an infinite graph.
    """
    from .tower import MarkovWeightedGraph, pointed

    if not isinstance(obj, dict):
        raise InputError("graph file: top level must be an object")
    unknown = sorted(set(obj) - set(GRAPH_KEYS))
    if unknown:
        raise InputError(f"graph file: unknown key(s) {unknown}")
    for key in ("odd", "even", "edges"):
        if key not in obj:
            raise InputError(f"graph file: missing key {key!r}")
    odd, even, edges = obj["odd"], obj["even"], obj["edges"]
    for key, labels in (("odd", odd), ("even", even)):
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise InputError(f"graph file: {key!r} must be a list of strings")
        if len(set(labels)) != len(labels):
            raise InputError(f"graph file: duplicate labels in {key!r}")
    oi = {x: k for k, x in enumerate(odd)}
    ei = {x: k for k, x in enumerate(even)}
    mult = [[0] * len(even) for _ in odd]
    if not isinstance(edges, list):
        raise InputError("graph file: 'edges' must be a list")
    for n, e in enumerate(edges):
        where = f"edges[{n}]"
        if not (isinstance(e, list) and len(e) == 3):
            raise InputError(f"{where}: expected [odd_label, even_label, multiplicity]")
        a, b, m = e
        if a not in oi:
            raise InputError(f"{where}: unknown odd label {a!r}")
        if b not in ei:
            raise InputError(f"{where}: unknown even label {b!r}")
        if isinstance(m, bool) or not isinstance(m, int) or m < 0:
            raise InputError(f"{where}: multiplicity must be a nonnegative integer")
        if mult[oi[a]][ei[b]]:
            raise InputError(f"{where}: duplicate edge {a!r}-{b!r}")
        mult[oi[a]][ei[b]] = m
    try:
        g = BipartiteGraph(tuple(odd), tuple(even), tuple(tuple(r) for r in mult))
    except (GraphError, OverflowError) as exc:
        raise InputError(f"graph file: {exc}") from None
    li = parse_number(obj["lambda_inv"], "lambda_inv") if "lambda_inv" in obj else None
    if "weights" not in obj:
        if li is not None:
            raise InputError("graph file: 'lambda_inv' given without 'weights'")
        return g
    wobj = obj["weights"]
    if not isinstance(wobj, dict) or set(wobj) != set(even):
        raise InputError("weights: must map every even label to a number")
    w = tuple(parse_number(wobj[j], f"weights[{j!r}]") for j in even)
    if any(not x > 0 for x in w):
        raise InputError("weights: must be strictly positive")
    if li is None:
        return WeightedGraph(g, w)
    try:
        ones = [j for j, x in zip(even, w) if x == 1]
        if ones:
            return MarkovWeightedGraph(g, w, li, base=ones[0])
        return pointed(g, w, li)
    except GraphError:
        return WeightedGraph(g, w, li)


def parse_graph_file(source):
    obj, _ = _load_json(source)
    return graph_from_json(obj)


def graph_to_json(g, weights=None, lambda_inv=None) -> dict:
    from .tower import MarkovWeightedGraph

    if isinstance(g, MarkovWeightedGraph):
        weights, lambda_inv, g = g.traces, g.lambda_inv, g.graph
    elif isinstance(g, WeightedGraph):
        weights = g.weights
        lambda_inv = g.lambda_inv if lambda_inv is None else lambda_inv
        g = g.graph
    out = {"odd": list(g.odd_labels), "even": list(g.even_labels),
           "edges": [[a, b, m] for a, row in zip(g.odd_labels, g.mult)
                     for b, m in zip(g.even_labels, row) if m]}
    if weights is not None:
        out["weights"] = {j: format_number(x) for j, x in zip(g.even_labels, weights)}
    if lambda_inv is not None:
        out["lambda_inv"] = format_number(lambda_inv)
    return out


def serialize_graph(g, weights=None, lambda_inv=None) -> str:
    """Canonical text: keys in schema order, edges in row-major order, trailing newline."""
    return json.dumps(graph_to_json(g, weights, lambda_inv)) + "\n"


# ---------------------------------------------------------------------------
# scenes


def _parse_entry(x, where: str) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            raise InputError(f"{where}: complex entries are [re, im]")
        return complex(_parse_real(x[0], where), _parse_real(x[1], where))
    return complex(_parse_real(x, where), 0.0)


def _parse_real(x, where: str) -> float:
    if isinstance(x, str):
        try:
            return float(Fraction(x)) if "/" in x else float(Decimal(x))
        except (ValueError, ArithmeticError):
            raise InputError(f"{where}: cannot parse number {x!r}") from None
    return float(parse_number(x, where))


def _parse_matrix(m, D: int, where: str) -> np.ndarray:
    if not (isinstance(m, list) and len(m) == D and all(isinstance(r, list) and len(r) == D for r in m)):
        raise InputError(f"{where}: expected a {D}x{D} matrix")
    return np.array([[_parse_entry(x, f"{where}[{a}][{b}]") for b, x in enumerate(r)]
                     for a, r in enumerate(m)], dtype=complex)


def scene_from_json(obj) -> dict:
    """Decode a scene: returns ``{"name", "ambient", "subalgebras": {role: Embedded}, "lambda_inv"}``."""
    from .algebra import EmbeddedSubalgebra, MultiMatrixAlgebra, SubalgebraError, TraceError

    if not isinstance(obj, dict):
        raise InputError("scene file: top level must be an object")
    unknown = sorted(set(obj) - set(SCENE_KEYS))
    if unknown:
        raise InputError(f"scene file: unknown key(s) {unknown}")
    amb = obj.get("ambient")
    if not isinstance(amb, dict) or set(amb) != {"block_sizes", "trace_weights"}:
        raise InputError("ambient: expected {'block_sizes': [...], 'trace_weights': [...]}")
    sizes = amb["block_sizes"]
    if not isinstance(sizes, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in sizes):
        raise InputError("ambient.block_sizes: expected a list of integers")
    weights = [parse_number(w, f"ambient.trace_weights[{k}]") for k, w in enumerate(amb["trace_weights"])]
    try:
        M = MultiMatrixAlgebra(tuple(sizes), tuple(weights))
    except (ValueError, TraceError) as exc:
        raise InputError(f"ambient: {exc}") from None
    subs = obj.get("subalgebras", {})
    if not isinstance(subs, dict):
        raise InputError("subalgebras: expected an object role -> list of matrices")
    out = {}
    for role, mats in subs.items():
        if role not in SCENE_ROLES:
            raise InputError(f"subalgebras: unknown role {role!r}")
        if not isinstance(mats, list) or not mats:
            raise InputError(f"subalgebras.{role}: expected a nonempty list of matrices")
        elems = [_parse_matrix(m, M.size, f"subalgebras.{role}[{k}]") for k, m in enumerate(mats)]
        try:
            out[role] = EmbeddedSubalgebra.span(M, elems, name=role)
        except SubalgebraError as exc:
            raise InputError(f"subalgebras.{role}: {exc}") from None
    li = parse_number(obj["lambda_inv"], "lambda_inv") if "lambda_inv" in obj else None
    return {"name": obj.get("name", ""), "ambient": M, "subalgebras": out, "lambda_inv": li}


def parse_scene_file(source) -> dict:
    obj, _ = _load_json(source)
    return scene_from_json(obj)


def complex_to_json(z: complex):
    re, im = float(z.real), float(z.imag)
    if im == 0 and re == int(re):
        return int(re)
    return [repr(re), repr(im)]
