"""Markov cells: non-degenerate commuting squares with Markov rows, and their index."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .algebra import (EmbeddedSubalgebra, MultiMatrixAlgebra, commuting_square_check,
                      inclusion_matrix, nondegeneracy_check)
from .graph_core import BipartiteGraph, is_connected
from .spectral import norm_squared, verify_markov
from .tower import BratteliTower, build_tower, pointed

CORPUS = ("spin2", "fourier3")


class UnverifiedCellError(ValueError):
    """Operation needs a cell whose certificate is all true."""


@dataclass(frozen=True, eq=False)
class MarkovCell:
    """Square ``P00 subset P01, P10 subset P11`` with ``P11`` the ambient algebra.

    ``P01`` is the top-left corner of the upper row and ``P10`` the left end of
    the lower row, so the rows are ``P00 subset P01`` and ``P10 subset P11`` and
    the columns are ``P00 subset P10`` and ``P01 subset P11``.
    """

    ambient: MultiMatrixAlgebra
    P00: EmbeddedSubalgebra
    P01: EmbeddedSubalgebra
    P10: EmbeddedSubalgebra
    lambda_inv: object
    name: str = ""

    @property
    def P11(self) -> EmbeddedSubalgebra:
        return self.ambient.whole()


@dataclass(frozen=True)
class CellCertificate:
    csq_ok: bool
    nondegenerate_ok: bool
    rows_markov_ok: bool
    graphs_irreducible_ok: bool
    vertical_graph: BipartiteGraph
    subfactor_index: float
    row_graphs: tuple[BipartiteGraph, BipartiteGraph]
    column_graphs: tuple[BipartiteGraph, BipartiteGraph]
    row_markov_residuals: tuple[float, float]
    row_norms_squared: tuple[float, float]
    column_norms_squared: tuple[float, float]
    composition_ok: bool

    @property
    def verified(self) -> bool:
        return self.csq_ok and self.nondegenerate_ok and self.rows_markov_ok and self.graphs_irreducible_ok

    def to_json(self) -> dict:
        def gj(g):
            return [list(r) for r in g.mult]
        return {
            "csq_ok": self.csq_ok,
            "nondegenerate_ok": self.nondegenerate_ok,
            "rows_markov_ok": self.rows_markov_ok,
            "graphs_irreducible_ok": self.graphs_irreducible_ok,
            "verified": self.verified,
            "vertical_graph": gj(self.vertical_graph),
            "subfactor_index": self.subfactor_index,
            "row_graphs": [gj(g) for g in self.row_graphs],
            "column_graphs": [gj(g) for g in self.column_graphs],
            "row_markov_residuals": list(self.row_markov_residuals),
            "row_norms_squared": list(self.row_norms_squared),
            "column_norms_squared": list(self.column_norms_squared),
            "composition_ok": self.composition_ok,
        }


def _row_markov(small: EmbeddedSubalgebra, big: EmbeddedSubalgebra, lambda_inv, tol: float):
    g = inclusion_matrix(small, big)
    t = big.minimal_traces()
    return g, verify_markov(g, t, float(lambda_inv), tol)


def verify_cell(cell: MarkovCell, tol: float = 1e-9) -> CellCertificate:
    """Commuting square, non-degeneracy, Markov rows and connected rows; index of the vertical graph."""
    M = cell.ambient
    P11 = cell.P11
    csq = commuting_square_check(M, cell.P01, cell.P10, tol=max(tol, 1e-10))
    Q = csq.intersection
    same_corner = Q.dim == cell.P00.dim and cell.P00.is_subalgebra_of(Q)
    csq_ok = csq.is_csq and same_corner
    nondeg = nondegeneracy_check(M, cell.P01, cell.P10)
    g0, r0 = _row_markov(cell.P00, cell.P01, cell.lambda_inv, tol)
    g1, r1 = _row_markov(cell.P10, P11, cell.lambda_inv, tol)
    c0 = inclusion_matrix(cell.P00, cell.P10)
    c1 = inclusion_matrix(cell.P01, P11)
    lhs = np.array(c0.mult, dtype=object) @ np.array(g1.mult, dtype=object)
    rhs = np.array(g0.mult, dtype=object) @ np.array(c1.mult, dtype=object)
    return CellCertificate(
        csq_ok=bool(csq_ok),
        nondegenerate_ok=bool(nondeg),
        rows_markov_ok=r0.passed and r1.passed,
        graphs_irreducible_ok=is_connected(g0) and is_connected(g1),
        vertical_graph=c0,
        subfactor_index=norm_squared(c0),
        row_graphs=(g0, g1),
        column_graphs=(c0, c1),
        row_markov_residuals=(r0.residual, r1.residual),
        row_norms_squared=(norm_squared(g0), norm_squared(g1)),
        column_norms_squared=(norm_squared(c0), norm_squared(c1)),
        composition_ok=bool((lhs == rhs).all()),
    )


@dataclass(frozen=True)
class CellTowerPreview:
    upper: BratteliTower
    lower: BratteliTower
    row_norms_squared: tuple[float, float]
    column_norms_squared: tuple[float, float]
    rows_match: bool
    columns_match: bool


def cell_tower_preview(cell: MarkovCell, depth: int, tol: float = 1e-9,
                       certificate: CellCertificate | None = None) -> CellTowerPreview:
    """Graph-level towers of both rows, with the row and column norm identities."""
    cert = verify_cell(cell, tol) if certificate is None else certificate
    if not cert.verified:
        raise UnverifiedCellError("cell does not verify; no tower preview")
    towers = []
    for small, big, g in ((cell.P00, cell.P01, cert.row_graphs[0]), (cell.P10, cell.P11, cert.row_graphs[1])):
        t = big.minimal_traces()
        towers.append(build_tower(pointed(g, t, cell.lambda_inv, tol=max(tol, 1e-9)), depth))
    rn, cn = cert.row_norms_squared, cert.column_norms_squared
    return CellTowerPreview(towers[0], towers[1], rn, cn,
                            abs(rn[0] - rn[1]) <= 2 * tol * max(1.0, rn[0]),
                            abs(cn[0] - cn[1]) <= 2 * tol * max(1.0, cn[0]))


def cell_from_scene(scene: dict) -> MarkovCell:
    from .io import InputError

    subs = scene["subalgebras"]
    missing = [r for r in ("P00", "P01", "P10") if r not in subs]
    if missing:
        raise InputError(f"cell file: missing role(s) {missing}")
    if "P11" in subs and subs["P11"].dim != scene["ambient"].dim:
        raise InputError("cell file: P11 must be the whole ambient algebra")
    if scene["lambda_inv"] is None:
        raise InputError("cell file: missing 'lambda_inv'")
    for small, big in (("P00", "P01"), ("P00", "P10")):
        if not subs[small].is_subalgebra_of(subs[big]):
            raise InputError(f"cell file: {small} is not contained in {big}")
    return MarkovCell(scene["ambient"], subs["P00"], subs["P01"], subs["P10"],
                      scene["lambda_inv"], scene["name"])


def load_cell(source) -> MarkovCell:
    from .io import parse_scene_file

    return cell_from_scene(parse_scene_file(source))


def corpus_cell(name: str) -> MarkovCell:
    """Shipped cells: ``spin2`` (2x2 Fourier) and ``fourier3`` (3x3 Fourier)."""
    from .io import scene_from_json

    if name not in CORPUS:
        raise KeyError(f"unknown corpus cell {name!r}; available: {CORPUS}")
    text = resources.files("subspec.data.cells").joinpath(f"{name}.json").read_text()
    return cell_from_scene(scene_from_json(json.loads(text)))
