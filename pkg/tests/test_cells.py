from __future__ import annotations

import numpy as np
import pytest

from subspec.algebra import EmbeddedSubalgebra, MultiMatrixAlgebra
from subspec.cells import (CORPUS, MarkovCell, UnverifiedCellError, cell_tower_preview, corpus_cell, load_cell,
                           verify_cell)


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_cells_verify(name):
    cert = verify_cell(corpus_cell(name))
    assert cert.verified
    assert cert.composition_ok
    assert cert.row_norms_squared[0] == pytest.approx(cert.row_norms_squared[1])


def test_unknown_corpus_name():
    with pytest.raises(KeyError):
        corpus_cell("nope")


def test_degenerate_square_is_flagged():
    M = MultiMatrixAlgebra.full(2)
    units = []
    for k in range(2):
        e = np.zeros((2, 2), complex)
        e[k, k] = 1
        units.append(e)
    D = EmbeddedSubalgebra.span(M, units)
    cell = MarkovCell(M, D, D, D, 2)
    cert = verify_cell(cell)
    assert cert.csq_ok
    assert not cert.nondegenerate_ok
    assert not cert.verified
    with pytest.raises(UnverifiedCellError):
        cell_tower_preview(cell, 4, certificate=cert)


def test_tower_preview_rows_match():
    prev = cell_tower_preview(corpus_cell("spin2"), 6)
    assert prev.rows_match and prev.columns_match
    assert prev.upper.total_dimensions()[:3] == [1, 1, 2]


def test_sample_cell_file_loads(tmp_path):
    import json
    from importlib import resources

    text = resources.files("subspec.data.cells").joinpath("spin2.json").read_text()
    p = tmp_path / "cell.json"
    p.write_text(text)
    assert verify_cell(load_cell(str(p))).subfactor_index == pytest.approx(2)
    obj = json.loads(text)
    del obj["subalgebras"]["P10"]
    p.write_text(json.dumps(obj))
    from subspec.io import InputError
    with pytest.raises(InputError):
        load_cell(str(p))
