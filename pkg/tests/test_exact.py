from __future__ import annotations

from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

from subspec import exact


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=4, max_size=4))
def test_charpoly_matches_numpy(rows):
    A = np.array(rows)
    S = (A + A.T).tolist()
    p = exact.charpoly(S)
    assert np.allclose(p, np.poly(np.array(S, float)), atol=1e-6)


def test_sturm_counts_roots():
    # (x-1)(x-2)(x-5)
    seq = exact.sturm_sequence([1, -8, 17, -10])
    assert exact.count_roots_above(seq, 0) == 3
    assert exact.count_roots_above(seq, Fraction(3, 2)) == 2
    assert exact.count_roots_above(seq, 5) == 0


def test_golden_bound_sign():
    # x^2 - 4x - 1 has largest root 2 + sqrt5 exactly
    seq = exact.sturm_sequence([1, -4, -1])
    assert exact.count_roots_above_qsqrt5(seq, 2, 1) == 0
    assert exact.count_roots_above_qsqrt5(seq, 2, 0) == 1


def test_isolate_largest_root():
    lo, hi = exact.isolate_largest_root([1, 0, -2])
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo <= Fraction(1, 10**12)
