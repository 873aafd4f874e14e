from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subspec.algebra import (EmbeddedSubalgebra, MultiMatrixAlgebra, SubalgebraError, basic_construction,
                             commuting_square_check, expectation, inclusion_matrix, index_via_ob, ob_defects,
                             orthonormal_basis, probabilistic_index)


def diag_units(n):
    out = []
    for k in range(n):
        e = np.zeros((n, n), complex)
        e[k, k] = 1
        out.append(e)
    return out


def m2():
    return MultiMatrixAlgebra((2,), (Fraction(1, 2),))


def scalars(M):
    return EmbeddedSubalgebra.span(M, [M.identity()], name="B")


def diagonal(M):
    return EmbeddedSubalgebra.span(M, diag_units(M.size), name="B")


def random_positive(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return Z @ Z.conj().T


def test_multimatrix_trace_is_normalized():
    M = MultiMatrixAlgebra((1, 2), (Fraction(1, 3), Fraction(1, 3)))
    assert M.dim == 5 and M.size == 3
    assert M.trace(M.identity()) == pytest.approx(1.0)


def test_non_algebra_span_rejected():
    M = m2()
    x = np.array([[0, 1], [0, 0]], complex)
    with pytest.raises(SubalgebraError):
        EmbeddedSubalgebra.span(M, [M.identity(), x]).check()


def test_generated_algebra_closes():
    M = MultiMatrixAlgebra.full(3)
    x = np.diag([1, 2, 2]).astype(complex)
    A = EmbeddedSubalgebra.generated(M, [x])
    assert A.dim == 2


def test_inclusion_matrix_of_block_embedding():
    # M_1 + M_2 sitting in M_3 as block diagonal
    M = MultiMatrixAlgebra.full(3)
    gens = [np.diag([1, 0, 0]).astype(complex)]
    for a in range(2):
        for b in range(2):
            e = np.zeros((3, 3), complex)
            e[1 + a, 1 + b] = 1
            gens.append(e)
    A = EmbeddedSubalgebra.span(M, gens)
    assert A.dim == 5
    g = inclusion_matrix(A, M.whole())
    assert g.mult == ((1,), (1,))


def test_expectation_is_unital_projection():
    M = m2()
    E = expectation(M, diagonal(M))
    x = np.array([[1, 2], [3, 4]], complex)
    assert np.allclose(E(x), np.diag([1, 4]))
    assert np.allclose(E(E(x)), E(x))


@given(st.integers(0, 2**32 - 1))
def test_expectation_preserves_positivity(seed):
    rng = np.random.default_rng(seed)
    M = MultiMatrixAlgebra((1, 2), (Fraction(1, 3), Fraction(1, 3)))
    B = EmbeddedSubalgebra.span(M, [M.identity()])
    E = expectation(M, B)
    for _ in range(100):
        x = np.zeros((3, 3), complex)
        x[0, 0] = abs(rng.normal())
        x[1:, 1:] = random_positive(rng, 2)
        assert np.linalg.eigvalsh(E(x)).min() >= -1e-12


def test_commuting_square_is_symmetric():
    M = MultiMatrixAlgebra.full(4)
    # diagonal matrices and block-diagonal pairs: a commuting square over the diagonal
    D = EmbeddedSubalgebra.span(M, diag_units(4))
    units = []
    for blk in (0, 2):
        for a in range(2):
            for b in range(2):
                e = np.zeros((4, 4), complex)
                e[blk + a, blk + b] = 1
                units.append(e)
    P = EmbeddedSubalgebra.span(M, units)
    r1 = commuting_square_check(M, P, D)
    r2 = commuting_square_check(M, D, P)
    assert r1.is_csq == r2.is_csq
    assert r1.intersection.dim == r2.intersection.dim == 4


@pytest.mark.parametrize("sub,index", [(scalars, 4.0), (diagonal, 2.0)])
def test_index_is_basis_independent(sub, index):
    M = m2()
    E = expectation(M, sub(M))
    for seed in (None, 1, 2, 3):
        basis = orthonormal_basis(E, seed=seed)
        assert ob_defects(E, basis) <= 1e-10
        assert index_via_ob(basis) == pytest.approx(index, abs=1e-9)


@pytest.mark.parametrize("sub,regime", [(scalars, "inequality"), (diagonal, "equality")])
def test_probabilistic_index_bracket(sub, regime):
    M = m2()
    E = expectation(M, sub(M))
    rep = probabilistic_index(E, samples=2000, seed=3)
    assert rep.regime == regime
    assert rep.lambda_lower <= 0.5 + 1e-12 <= rep.lambda_upper + 1e-12
    inv = 1 / rep.lambda_upper
    assert inv - 1e-9 <= rep.ind_ob <= inv ** 2 + 1e-9


def test_grid_method_agrees():
    M = m2()
    E = expectation(M, scalars(M))
    rep = probabilistic_index(E, method="grid", samples=400, refine=2)
    assert rep.lambda_upper == pytest.approx(0.5, abs=1e-6)


def test_basic_construction_jones_relation():
    M = m2()
    sc = basic_construction(M, diagonal(M))
    e = sc.e_B
    assert np.allclose(e @ e, e) and np.allclose(e, e.conj().T)
    assert sc.E1(e) == pytest.approx(0.5 * np.eye(e.shape[0]))
