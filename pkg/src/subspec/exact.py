"""Exact integer characteristic polynomials and Sturm-sequence root certification.

Polynomials are coefficient lists, highest degree first.  Evaluation points
are rationals or numbers ``a + b*sqrt(5)`` with rational ``a, b``; all sign
decisions are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def charpoly(mat: Sequence[Sequence[int]]) -> list[int]:
    """Monic characteristic polynomial ``det(x I - A)`` by Faddeev-LeVerrier.

    Every division in the recursion is exact for integer ``A``.
    """
    n = len(mat)
    A = [[int(x) for x in row] for row in mat]
    coeffs = [1]
    M = [[0] * n for _ in range(n)]
    c = 1
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        M = [[sum(A[i][l] * M[l][j] for l in range(n)) + (c if i == j else 0)
              for j in range(n)] for i in range(n)]
        tr = sum(sum(A[i][l] * M[l][i] for l in range(n)) for i in range(n))
        num = -tr
        if num % k:
            raise ArithmeticError("non-integer Faddeev-LeVerrier step")
        c = num // k
        coeffs.append(c)
    return coeffs


def poly_eval(p: Sequence, x):
    acc = 0
    for c in p:
        acc = acc * x + c
    return acc


def _trim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return list(p[i:])


def _derivative(p):
    n = len(p) - 1
    return [c * (n - k) for k, c in enumerate(p[:-1])] or [0]


def _rem(a, b):
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    while len(a) >= len(b) and any(a):
        q = a[0] / b[0]
        for k in range(len(b)):
            a[k] -= q * b[k]
        a.pop(0)
    return _trim(a) if a else [Fraction(0)]


def sturm_sequence(p: Sequence) -> list[list[Fraction]]:
    p0 = _trim([Fraction(c) for c in p])
    seq = [p0, _trim(_derivative(p0))]
    while len(seq[-1]) > 1 or seq[-1][0] != 0:
        r = _rem(seq[-2], seq[-1])
        if len(r) == 1 and r[0] == 0:
            break
        seq.append([-c for c in r])
        if len(seq[-1]) == 1:
            break
    return seq


def _sign_changes(signs) -> int:
    s = [x for x in signs if x != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _signs_at_inf(seq):
    return [_sign(q[0]) for q in seq]


def count_roots_above(seq, x) -> int:
    """Distinct real roots in ``(x, inf)`` of the first polynomial in ``seq``."""
    x = Fraction(x)
    return _sign_changes([_sign(poly_eval(q, x)) for q in seq]) - _sign_changes(_signs_at_inf(seq))


class QSqrt5:
    """Exact number ``a + b*sqrt(5)``."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a, self.b = Fraction(a), Fraction(b)

    def __add__(self, o):
        o = o if isinstance(o, QSqrt5) else QSqrt5(o)
        return QSqrt5(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __mul__(self, o):
        o = o if isinstance(o, QSqrt5) else QSqrt5(o)
        return QSqrt5(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def sign(self) -> int:
        sa, sb = _sign(self.a), _sign(self.b)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 5 b^2
        d = self.a * self.a - 5 * self.b * self.b
        return sa if d > 0 else (sb if d < 0 else 0)


def count_roots_above_qsqrt5(seq, a, b) -> int:
    """Distinct real roots in ``(a + b sqrt5, inf)``."""
    x = QSqrt5(a, b)
    signs = [poly_eval(q, x).sign() for q in seq]
    return _sign_changes(signs) - _sign_changes(_signs_at_inf(seq))


def largest_root_bracket(p: Sequence, approx: float, radius: float) -> tuple[Fraction, Fraction] | None:
    """Certify that the largest real root of ``p`` lies in ``[approx-radius, approx+radius]``.

    Returns the bracket when certified, else ``None``.
    """
    seq = sturm_sequence(p)
    lo = Fraction(approx) - Fraction(radius)
    hi = Fraction(approx) + Fraction(radius)
    if count_roots_above(seq, hi) == 0 and count_roots_above(seq, lo) >= 1:
        return lo, hi
    return None


def isolate_largest_root(p: Sequence, tol=Fraction(1, 10**12)) -> tuple[Fraction, Fraction]:
    """Bisect to an interval of width ``<= tol`` holding the largest real root."""
    seq = sturm_sequence(p)
    p0 = seq[0]
    bound = 1 + max((abs(Fraction(c) / p0[0]) for c in p0[1:]), default=0)
    lo, hi = -bound, bound
    if count_roots_above(seq, lo) == 0:
        raise ValueError("polynomial has no real roots")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if count_roots_above(seq, mid) >= 1:
            lo = mid
        else:
            hi = mid
    return lo, hi
