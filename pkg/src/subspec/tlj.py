"""Temperley-Lieb-Jones polynomials and the A_infinity coupling formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .graph_core import exact_sqrt


class PositivityError(ValueError):
    def __init__(self, n, value):
        self.n = n
        self.value = value
        super().__init__(f"P_{n}(lambda) = {value} is not positive")


@dataclass(frozen=True)
class JonesPolynomial:
    """``P_n(t)`` with integer coefficients, constant term first."""

    degree: int
    coefficients: tuple[int, ...]

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*t" if k == 1 else f"{c}*t^{k}")
        return " + ".join(terms) or "0"


@lru_cache(maxsize=None)
def _coeffs(n: int) -> tuple[int, ...]:
    if n in (-1, 0):
        return (1,)
    a = _coeffs(n - 1)
    b = _coeffs(n - 2)
    out = list(a) + [0] * (len(b) + 1 - len(a))
    for k, c in enumerate(b):
        out[k + 1] -= c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def jones_poly(n: int) -> JonesPolynomial:
    """``P_{-1} = P_0 = 1``, ``P_{n+1} = P_n - t P_{n-1}``."""
    if n < -1:
        raise ValueError("P_n is defined for n >= -1")
    for k in range(0, n, 256):  # warm the cache without deep recursion
        _coeffs(k)
    return JonesPolynomial(n, _coeffs(n))


def evaluate(P: JonesPolynomial, x):
    """Horner evaluation; exact for ``int``/``Fraction`` arguments."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        x = Fraction(x)
    acc = 0
    for c in reversed(P.coefficients):
        acc = acc * x + c
    return acc


def poly_values(lam, n_max: int) -> list:
    """``[P_{-1}(lam), P_0(lam), ..., P_{n_max}(lam)]`` by the recursion itself."""
    if isinstance(lam, (int, Fraction)) and not isinstance(lam, bool):
        lam = Fraction(lam)
    vals = [1, 1]
    for _ in range(n_max):
        vals.append(vals[-1] - lam * vals[-2])
    return vals[: n_max + 2]


@dataclass(frozen=True)
class Unbounded:
    n_max: int


def positivity_horizon(lam, n_max: int = 1000, tol: float = 0.0):
    """Largest ``n <= n_max`` with ``P_k(lam) > tol`` for all ``0 <= k <= n``.

    Returns :class:`Unbounded` when every value up to ``n_max`` is positive.
    With floating ``lam`` a small ``tol`` absorbs rounding of exact zeros.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    vals = poly_values(lam, n_max)
    for n in range(0, n_max + 1):
        if not vals[n + 1] > tol:
            return n - 1
    return Unbounded(n_max)


@dataclass(frozen=True)
class CouplingSequence:
    lam: object
    values: tuple[float, ...]
    squares: tuple  # exact d_n^2 when lam is rational


def a_inf_couplings(lam, n_max: int) -> CouplingSequence:
    """``d_n = sqrt(P_n(lam) / (lam P_{n-1}(lam)))`` for ``n = 0..n_max``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    vals = poly_values(lam, n_max)
    if isinstance(lam, (int, Fraction)):
        lam = Fraction(lam)
    squares = []
    for n in range(n_max + 1):
        pn, pm = vals[n + 1], vals[n]
        if not pn > 0:
            raise PositivityError(n, pn)
        squares.append(pn / (lam * pm))
    return CouplingSequence(lam, tuple(math.sqrt(float(q)) for q in squares), tuple(squares))


def locally_trivial_t(lam):
    """Smaller root ``t < 1/2`` of ``t(1-t) = lam``; exact when the discriminant is a square."""
    if not 0 < lam < Fraction(1, 4):
        raise ValueError("need 0 < lambda < 1/4 for a root t < 1/2")
    if isinstance(lam, (int, Fraction)):
        root = exact_sqrt(1 - 4 * Fraction(lam))
        if root is not None:
            return (1 - root) / 2
    return (1 - math.sqrt(1 - 4 * float(lam))) / 2


def locally_trivial_couplings(lam, n_range: Iterable[int]) -> dict:
    """``{n: d_{2n}}`` with ``d_{2n} = ((1-t)/t)^n`` on the two-sided line."""
    t = locally_trivial_t(lam)
    r = (1 - t) / t
    return {n: r ** n for n in n_range}
