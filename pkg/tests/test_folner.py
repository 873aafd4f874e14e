from __future__ import annotations

from fractions import Fraction

from hypothesis import given, strategies as st

from subspec.folner import (certificate_check, interval_search, norm_bound_from_certificate,
                            spectral_cut_search)
from subspec.graph_core import a_infinity, a_two_sided, d_infinity


def test_certificate_is_exact_on_rational_weights():
    cert = certificate_check(a_infinity(4), range(13), 0.5)
    assert cert.exact
    assert cert.boundary == frozenset({13})
    assert cert.boundary_sq == 729 and cert.bulk_sq == 2925


def test_shorter_interval_fails():
    cert = certificate_check(a_infinity(4), range(12), 0.5)
    assert not cert.passed
    assert cert.ratio > 0.5


@given(st.integers(2, 60))
def test_ratio_decreases_along_intervals(n):
    g = a_infinity(4)
    r1 = certificate_check(g, range(n), 0.5).ratio
    r2 = certificate_check(g, range(n + 1), 0.5).ratio
    assert r2 < r1


@given(st.integers(1, 200))
def test_norm_bound_never_exceeds_index(n):
    g = a_infinity(4)
    cert = certificate_check(g, range(n), 10.0)
    assert norm_bound_from_certificate(g, cert) <= 4 + 1e-12


def test_interval_search_finds_smallest_interval():
    out = interval_search(a_infinity(4), 0.5)
    assert out.found
    assert len(out.certificate.F) == 13


def test_spectral_search_on_other_graphs():
    assert spectral_cut_search(a_two_sided(4), 0.7).found
    assert spectral_cut_search(d_infinity(4), 0.3).found


def test_exhausted_above_amenable_index():
    out = interval_search(a_infinity(Fraction(9, 2)), 0.5, max_size=500)
    assert out.tag == "Exhausted"
    assert out.certificate is None
    assert out.best_ratio > 0.5


def test_certificate_json_sorts_labels():
    cert = certificate_check(a_infinity(4), range(12), 0.5)
    assert cert.to_json()["F"] == list(range(12))
