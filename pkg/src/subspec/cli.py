"""Command-line front end.  Reports are JSON on stdout; exit codes 0 ok, 1 check failed, 2 bad input."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .graph_core import BUILTINS, BipartiteGraph, GraphError, LazyWeightedGraph, MarkovRelationError, WeightedGraph
from .io import InputError, fingerprint, format_number, graph_to_json, parse_graph_file, parse_scene_file

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class CheckFailed(Exception):
    """Carries a report whose check failed (exit 1)."""

    def __init__(self, report: dict):
        self.report = report


def _num(s: str):
    """Exact rational from ``"4"``, ``"9/2"`` or ``"4.5"``."""
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_number(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return x


# ---------------------------------------------------------------------------
# inputs


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _graph_input(args, inputs: dict, need_weights: bool = False):
    if getattr(args, "builtin", None):
        if args.lambda_inv is None:
            raise InputError("--builtin needs --lambda-inv")
        g = BUILTINS[args.builtin](args.lambda_inv)
        inputs["builtin"] = fingerprint(json.dumps(g.descriptor, sort_keys=True))
        return g
    if not getattr(args, "graph", None):
        raise InputError("give --graph FILE" + (" or --builtin NAME" if hasattr(args, "builtin") else ""))
    raw = _read(args.graph)
    inputs["graph"] = fingerprint(raw)
    g = parse_graph_file(raw)
    if need_weights and isinstance(g, BipartiteGraph):
        raise InputError(f"{args.graph}: this command needs 'weights' and 'lambda_inv'")
    return g


def _finite(g) -> BipartiteGraph:
    if isinstance(g, LazyWeightedGraph):
        raise InputError("this command needs a finite graph file")
    return g.graph if isinstance(g, WeightedGraph) else g


def _parse_set(spec: str, g) -> set:
    lazy = isinstance(g, LazyWeightedGraph)
    out = set()
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            try:
                lo, hi = int(a), int(b)
            except ValueError:
                raise InputError(f"--set: bad range {part!r}") from None
            items = range(lo, hi + 1)
        else:
            items = [part]
        for x in items:
            if lazy:
                try:
                    out.add(int(x))
                except ValueError:
                    raise InputError(f"--set: vertex {x!r} is not an integer") from None
            else:
                out.add(str(x))
    if not out:
        raise InputError("--set is empty")
    if not lazy:
        labels = set(_finite(g).even_labels)
        bad = sorted(out - labels)
        if bad:
            raise InputError(f"--set: unknown even label(s) {bad}")
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_norm(args, inputs):
    from .spectral import jones_spectrum_member, norm_report

    g = _finite(_graph_input(args, inputs))
    r = norm_report(g, tol=args.tol)
    v = jones_spectrum_member(r.norm_squared)
    return {"norm_squared": r.norm_squared, "reducible": r.reducible,
            "component_norms_squared": list(r.component_norms), "certified": r.certified,
            "jones_spectrum": {"tag": v.tag, "witness_n": v.witness_n}}


def cmd_perron(args, inputs):
    import numpy as np

    from .spectral import perron

    g = _finite(_graph_input(args, inputs))
    gram = g.gram_even() if args.side == "even" else g.gram_odd()
    labels = g.even_labels if args.side == "even" else g.odd_labels
    res = perron(np.array(gram, dtype=float), tol=args.tol, seed=args.seed)
    return {"side": args.side, "eigenvalue": res.eigenvalue,
            "vector": dict(zip(labels, (float(x) for x in res.vector))),
            "residual_inf": res.residual_inf, "iterations": res.iterations}


def cmd_markov(args, inputs):
    from .spectral import markov_weight, verify_markov
    from .tower import MarkovWeightedGraph

    g = _graph_input(args, inputs)
    if isinstance(g, WeightedGraph):
        if g.lambda_inv is None:
            raise InputError("weights given without lambda_inv")
        chk = verify_markov(g.graph, g.weights, g.lambda_inv, args.tol)
        rep = {"mode": "verify", "residual": chk.residual, "passed": chk.passed,
               "lambda_inv": g.lambda_inv,
               "weights": dict(zip(g.graph.even_labels, g.traces if isinstance(g, MarkovWeightedGraph)
                                   else g.weights))}
        if not chk.passed:
            raise CheckFailed(rep)
        return rep
    m = markov_weight(g, args.basepoint)
    return {"mode": "compute", "lambda_inv": m.lambda_inv, "basepoint": m.base,
            "weights": dict(zip(g.even_labels, m.weights)), "graph": graph_to_json(m)}


def cmd_tower(args, inputs):
    from .spectral import markov_weight
    from .tower import MarkovWeightedGraph, build_tower

    g = _graph_input(args, inputs)
    if isinstance(g, MarkovWeightedGraph) or isinstance(g, LazyWeightedGraph):
        m = g
    elif isinstance(g, WeightedGraph):
        raise CheckFailed({"error": "weights do not satisfy the Markov relation"})
    else:
        m = markov_weight(g, args.basepoint)
    tw = build_tower(m, args.depth)
    rep = tw.to_json()
    rep["total_dimensions"] = tw.total_dimensions()
    return rep


def cmd_tlj(args, inputs):
    from .tlj import Unbounded, jones_poly, poly_values, positivity_horizon

    rep = {}
    if args.n is not None:
        p = jones_poly(args.n)
        rep["polynomial"] = {"n": args.n, "coefficients": list(p.coefficients), "text": str(p)}
    if args.lam is not None:
        h = positivity_horizon(args.lam, args.n_max)
        rep["lambda"] = args.lam
        rep["positivity_horizon"] = "unbounded" if isinstance(h, Unbounded) else h
        rep["n_max"] = args.n_max
        k = min(args.n_max, 20)
        rep["values"] = {str(n - 1): v for n, v in enumerate(poly_values(args.lam, k))}
    if not rep:
        raise InputError("tlj needs --n and/or --lambda")
    return rep


def cmd_couplings(args, inputs):
    from .graph_core import a_infinity
    from .tlj import PositivityError, a_inf_couplings, locally_trivial_couplings, locally_trivial_t
    from .tower import coupling_check

    if args.family == "a_inf":
        try:
            seq = a_inf_couplings(args.lam, args.n_max)
        except PositivityError as exc:
            raise CheckFailed({"family": "a_inf", "error": str(exc), "n": exc.n})
        rep = {"family": "a_inf", "lambda": args.lam, "d": list(seq.values),
               "d_squared": [format_number(q) for q in seq.squares]}
        # diagnostic: the printed sequence against the eigen relation on a truncation (not asserted)
        li = 1 / Fraction(args.lam)
        if li >= 4 and args.n_max >= 2:
            tr = a_infinity(li).truncate(args.n_max)
            k = len(tr.graph.even_labels)
            dm = [seq.values[min(i, len(seq.values) - 1)] for i in range(k)]
            dn = [sum(row[j] * dm[j] for j in range(k)) for row in tr.graph.mult]
            rep["eigen_relation_diagnostic"] = {
                "residual": coupling_check(tr, dm, dn, float(li)).residual_eigen,
                "asserted": False,
                "note": "open question: the printed sequence is bounded while eigen-relation "
                        "solutions on the half line are unbounded",
            }
        return rep
    t = locally_trivial_t(args.lam)
    d = locally_trivial_couplings(args.lam, range(-args.n_max, args.n_max + 1))
    return {"family": "two_sided", "lambda": args.lam, "t": t, "d_even": {str(n): v for n, v in d.items()}}


def _folner_graph(args, inputs):
    g = _graph_input(args, inputs, need_weights=True)
    return g


def cmd_folner_check(args, inputs):
    from .folner import certificate_check, graph_fingerprint, norm_bound_from_certificate

    g = _folner_graph(args, inputs)
    F = _parse_set(args.set, g)
    cert = certificate_check(g, F, args.epsilon)
    rep = cert.to_json(graph_fingerprint(g))
    if cert.passed and g.lambda_inv is not None:
        rep["norm_lower_bound"] = norm_bound_from_certificate(g, cert)
    if not cert.passed:
        raise CheckFailed(rep)
    return rep


def cmd_folner_search(args, inputs):
    from .folner import graph_fingerprint, interval_search, norm_bound_from_certificate, spectral_cut_search

    g = _folner_graph(args, inputs)
    if args.method == "interval":
        out = interval_search(g, args.epsilon, args.max_size)
    else:
        out = spectral_cut_search(g, args.epsilon, args.max_size)
    rep = {"method": args.method, **out.to_json(graph_fingerprint(g))}
    if out.certificate is not None:
        rep["certificate"]["F_size"] = len(out.certificate.F)
    if out.found and g.lambda_inv is not None:
        rep["norm_lower_bound"] = norm_bound_from_certificate(g, out.certificate)
    if not out.found:
        raise CheckFailed(rep)
    return rep


def _load_cell(args, inputs):
    from .cells import cell_from_scene, corpus_cell

    if args.corpus:
        inputs["corpus"] = args.corpus
        return corpus_cell(args.corpus)
    if not args.cell:
        raise InputError("give --cell FILE or --corpus NAME")
    raw = _read(args.cell)
    inputs["cell"] = fingerprint(raw)
    return cell_from_scene(parse_scene_file(raw))


def cmd_cell_verify(args, inputs):
    from .cells import cell_tower_preview, verify_cell
    from .spectral import jones_spectrum_member

    cell = _load_cell(args, inputs)
    cert = verify_cell(cell, args.tol)
    rep = cert.to_json()
    rep["jones_spectrum"] = jones_spectrum_member(cert.subfactor_index).tag
    if cert.verified and args.depth:
        pv = cell_tower_preview(cell, args.depth, args.tol, cert)
        rep["tower_preview"] = {"upper_total_dimensions": pv.upper.total_dimensions(),
                                "lower_total_dimensions": pv.lower.total_dimensions(),
                                "rows_match": pv.rows_match, "columns_match": pv.columns_match}
    if not cert.verified:
        raise CheckFailed(rep)
    return rep


def _scene_B(args, inputs):
    raw = _read(args.scene)
    inputs["scene"] = fingerprint(raw)
    sc = parse_scene_file(raw)
    if "B" not in sc["subalgebras"]:
        raise InputError("scene needs a subalgebra with role 'B'")
    return sc["ambient"], sc["subalgebras"]["B"]


def cmd_basic_construction(args, inputs):
    from .algebra import basic_construction

    M, B = _scene_B(args, inputs)
    s = basic_construction(M, B)
    lam = s.E1(s.e_B)
    rep = {"dim_M": M.dim, "dim_B": B.dim, "dim_M1": s.dim_M1, "property_i_residual": s.residual_i,
           "commutant_ok": s.commutant_ok, "faithful_ok": s.faithful_ok, "support_ok": s.support_ok,
           "lambda_B_M": [list(r) for r in s.lambda_B_M.mult],
           "lambda_M_M1": [list(r) for r in s.lambda_M_M1.mult], "transpose_ok": s.transpose_ok,
           "E1_of_eB_diagonal": [float(x.real) for x in lam.diagonal()]}
    ok = s.residual_i <= 1e-10 and s.commutant_ok and s.faithful_ok and s.support_ok and s.transpose_ok
    rep["passed"] = ok
    if not ok:
        raise CheckFailed(rep)
    return rep


def cmd_index(args, inputs):
    from .algebra import expectation, index_via_ob, orthonormal_basis, probabilistic_index

    M, B = _scene_B(args, inputs)
    E = expectation(M, B)
    basis = orthonormal_basis(E)
    others = [index_via_ob(orthonormal_basis(E, seed=args.seed + k)) for k in range(1, 3)]
    r = probabilistic_index(E, method=args.method, samples=args.samples, seed=args.seed, basis=basis)
    return {"ind_ob": r.ind_ob, "ind_ob_other_orders": others, "ob_size": r.ob_size,
            "lambda_E_bracket": [r.lambda_lower, r.lambda_upper], "regime": r.regime,
            "samples": r.samples, "note": "sampled upper end is a bracket, not a certificate"}


def cmd_enumerate(args, inputs):
    from .espec import Atlas, classify, enumerate_graphs

    res = enumerate_graphs(args.max_vertices, args.max_multiplicity, args.max_edges, args.cap)
    atlas = classify(res)
    rep = {"counts_by_vertices": res.counts, "graphs": len(res), "truncated": res.truncated,
           "distinct_norms": len(atlas),
           "entries": [e.to_json() for e in atlas[: args.show]]}
    if args.atlas is not None:
        store = Atlas(args.atlas or None)
        rep["atlas_path"] = str(store.path)
        rep["atlas_appended"] = store.extend(atlas)
    return rep


def cmd_query_e2(args, inputs):
    from .espec import membership_query

    r = membership_query(args.alpha, args.tol, args.max_vertices, args.max_multiplicity, args.max_edges)
    rep = r.to_json()
    if not r.found:
        raise CheckFailed(rep)
    return rep


def to_dot(g: BipartiteGraph, name: str = "G") -> str:
    lines = [f"graph {json.dumps(name)} {{"]
    for lab in g.odd_labels:
        lines.append(f"  {json.dumps('o:' + lab)} [label={json.dumps(lab)}, shape=box];")
    for lab in g.even_labels:
        lines.append(f"  {json.dumps('e:' + lab)} [label={json.dumps(lab)}, shape=circle];")
    for a, row in zip(g.odd_labels, g.mult):
        for b, m in zip(g.even_labels, row):
            if m:
                attr = f" [label={m}]" if m > 1 else ""
                lines.append(f"  {json.dumps('o:' + a)} -- {json.dumps('e:' + b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "norm": cmd_norm, "perron": cmd_perron, "markov": cmd_markov, "tower": cmd_tower, "tlj": cmd_tlj,
    "couplings": cmd_couplings, "folner-search": cmd_folner_search, "folner-check": cmd_folner_check,
    "cell-verify": cmd_cell_verify, "basic-construction": cmd_basic_construction, "index": cmd_index,
    "enumerate": cmd_enumerate, "query-e2": cmd_query_e2,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subspec", description=__doc__)
    p.add_argument("--version", action="version", version=f"subspec {__version__}")
    p.add_argument("--table", action="store_true", help="also print a key/value table to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_args(sp, builtin=False):
        sp.add_argument("--graph", help="graph JSON file")
        if builtin:
            sp.add_argument("--builtin", choices=sorted(BUILTINS))
            sp.add_argument("--lambda-inv", type=_num, dest="lambda_inv")

    sp = sub.add_parser("norm", help="square norm and Jones-spectrum verdict")
    graph_args(sp)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("perron", help="Perron eigenpair of the Gram matrix on one side")
    graph_args(sp)
    sp.add_argument("--side", choices=("even", "odd"), default="even")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--seed", type=int, default=None)

    sp = sub.add_parser("markov", help="verify given weights or compute Perron weights")
    graph_args(sp)
    sp.add_argument("--basepoint")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("tower", help="Bratteli data of the tower")
    graph_args(sp, builtin=True)
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--basepoint")

    sp = sub.add_parser("tlj", help="Temperley-Lieb-Jones polynomials")
    sp.add_argument("--n", type=int)
    sp.add_argument("--lambda", type=_num, dest="lam")
    sp.add_argument("--n-max", type=int, default=1000, dest="n_max")

    sp = sub.add_parser("couplings", help="coupling constants on A_inf or the two-sided line")
    sp.add_argument("--lambda", type=_num, dest="lam", required=True)
    sp.add_argument("--n-max", type=int, default=10, dest="n_max")
    sp.add_argument("--family", choices=("a_inf", "two_sided"), default="a_inf")

    for name in ("folner-search", "folner-check"):
        sp = sub.add_parser(name, help="Følner certificate " + ("search" if name.endswith("search") else "check"))
        graph_args(sp, builtin=True)
        sp.add_argument("--epsilon", type=_num, required=True)
        if name == "folner-check":
            sp.add_argument("--set", required=True, help="even vertices, e.g. 0..12 or a,b,c")
        else:
            sp.add_argument("--method", choices=("spectral", "interval"), default="spectral")
            sp.add_argument("--max-size", type=int, default=10_000, dest="max_size")

    sp = sub.add_parser("cell-verify", help="verify a Markov cell")
    sp.add_argument("--cell")
    sp.add_argument("--corpus", choices=("spin2", "fourier3"))
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--depth", type=int, default=0, help="also preview row towers to this depth")

    sp = sub.add_parser("basic-construction", help="basic construction of a scene's B inside its ambient")
    sp.add_argument("--scene", required=True)

    sp = sub.add_parser("index", help="orthonormal-basis index and probabilistic index bracket")
    sp.add_argument("--scene", required=True)
    sp.add_argument("--method", choices=("bruteforce_rank1", "grid"), default="bruteforce_rank1")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("enumerate", help="enumerate graphs and classify their norms")
    sp.add_argument("--max-vertices", type=int, required=True, dest="max_vertices")
    sp.add_argument("--max-multiplicity", type=int, default=1, dest="max_multiplicity")
    sp.add_argument("--max-edges", type=int, default=None, dest="max_edges")
    sp.add_argument("--cap", type=int, default=2_000_000)
    sp.add_argument("--show", type=int, default=20, help="entries to include in the report")
    sp.add_argument("--atlas", nargs="?", const="", default=None,
                    help="append entries to this JSON-lines atlas (default under $SUBSPEC_ATLAS_DIR)")

    sp = sub.add_parser("query-e2", help="bounded search for a graph with a given square norm")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--max-vertices", type=int, default=10, dest="max_vertices")
    sp.add_argument("--max-multiplicity", type=int, default=1, dest="max_multiplicity")
    sp.add_argument("--max-edges", type=int, default=None, dest="max_edges")

    sp = sub.add_parser("emit-dot", help="Graphviz DOT for a graph file")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--name", default="G")
    return p


def _emit(report: dict, table: bool) -> None:
    sys.stdout.write(json.dumps(_jsonable(report), sort_keys=False) + "\n")
    if table:
        for k, v in report.items():
            if k not in ("tool", "version", "inputs"):
                print(f"{k:>28}  {json.dumps(_jsonable(v))[:100]}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs: dict = {}
    if args.command == "emit-dot":
        try:
            raw = _read(args.graph)
            g = _finite(parse_graph_file(raw))
        except (InputError, GraphError) as exc:
            print(f"subspec: error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        sys.stdout.write(to_dot(g, args.name))
        return EXIT_OK
    head = {"tool": "subspec", "version": __version__, "command": args.command}
    try:
        body = COMMANDS[args.command](args, inputs)
        code = EXIT_OK
    except CheckFailed as exc:
        body, code = exc.report, EXIT_FAIL
    except (InputError, GraphError, MarkovRelationError, ValueError, KeyError, OverflowError) as exc:
        print(f"subspec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {**head, "inputs": inputs, **body, "exit_code": code}
    _emit(report, args.table)
    return code


if __name__ == "__main__":
    sys.exit(main())
