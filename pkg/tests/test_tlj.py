from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from subspec.tlj import (PositivityError, Unbounded, a_inf_couplings, jones_poly, locally_trivial_couplings,
                         locally_trivial_t, poly_values, positivity_horizon)


def test_low_degree_polynomials():
    assert jones_poly(1).coefficients == (1, -1)
    assert jones_poly(2).coefficients == (1, -2)
    assert jones_poly(3).coefficients == (1, -3, 1)


@given(st.integers(0, 40), st.fractions(Fraction(0), Fraction(1), max_denominator=50))
def test_polynomial_agrees_with_recursion(n, lam):
    assert jones_poly(n)(lam) == poly_values(lam, n)[n + 1]


def test_horizon_unbounded_below_a_quarter():
    assert isinstance(positivity_horizon(Fraction(1, 5), n_max=200), Unbounded)
    assert isinstance(positivity_horizon(Fraction(1, 4), n_max=200), Unbounded)


@pytest.mark.parametrize("n", range(3, 12))
def test_horizon_at_coxeter_values(n):
    # lambda = 1/(4cos^2(pi/n)) makes P_{n-1} vanish first
    lam = 1 / (4 * math.cos(math.pi / n) ** 2)
    assert positivity_horizon(lam, tol=1e-12) == n - 3


def test_couplings_at_index_four_are_rational_squares():
    seq = a_inf_couplings(Fraction(1, 4), 6)
    assert seq.squares[1] == 3
    assert seq.values[0] == 2.0


def test_couplings_raise_past_horizon():
    with pytest.raises(PositivityError):
        a_inf_couplings(Fraction(1, 2), 4)


def test_locally_trivial_t_exact():
    assert locally_trivial_t(Fraction(21, 100)) == Fraction(3, 10)
    d = locally_trivial_couplings(Fraction(21, 100), range(-2, 3))
    assert d[0] == 1 and d[2] == Fraction(49, 9) and d[-1] == Fraction(3, 7)
