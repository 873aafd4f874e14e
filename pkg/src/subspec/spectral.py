"""Square norms, Perron-Frobenius eigenpairs, Markov weights and the Jones spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .graph_core import BipartiteGraph, GraphError, is_connected

DEFAULT_TOL = 1e-10
MAX_ITER = 10**6
EXACT_SIDE_LIMIT = 12


class ConvergenceError(RuntimeError):
    """Power iteration hit its iteration cap."""


class ReducibleMatrixError(ValueError):
    def __init__(self, components):
        self.components = components
        super().__init__(f"matrix is reducible; components {components}")


class CertificationError(ArithmeticError):
    """Floating result disagrees with the exact characteristic polynomial."""


@dataclass(frozen=True)
class PerronResult:
    eigenvalue: float
    vector: np.ndarray
    residual_inf: float
    iterations: int = 0


def _matrix_components(A: np.ndarray) -> list[list[int]]:
    n = A.shape[0]
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in np.nonzero(A[v])[0]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        comps.append(sorted(comp))
    return comps


def perron(A, tol: float = DEFAULT_TOL, seed: int | None = None,
           max_iter: int = MAX_ITER) -> PerronResult:
    """Dominant eigenpair of a symmetric, nonnegative, irreducible matrix.

    Power iteration on ``A + sigma I`` (the shift makes the dominant eigenvalue
    unique in modulus even for periodic ``A``).  Starts from the all-ones vector,
    or from a random positive vector when ``seed`` is given.  The returned vector
    is normalized so its first entry is 1.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("perron needs a square matrix")
    if (A < 0).any():
        raise ValueError("perron needs an entrywise nonnegative matrix")
    if not np.allclose(A, A.T, rtol=0, atol=0):
        raise ValueError("perron needs a symmetric matrix")
    comps = _matrix_components(A)
    if len(comps) > 1:
        raise ReducibleMatrixError(comps)
    n = A.shape[0]
    if seed is None:
        x = np.ones(n)
    else:
        x = np.random.default_rng(seed).uniform(0.5, 1.5, size=n)
    sigma = 0.5 * float(A.sum(axis=1).max())
    B = A + sigma * np.eye(n)
    x /= np.linalg.norm(x)
    mu, res = 0.0, math.inf
    for it in range(1, max_iter + 1):
        y = A @ x
        mu = float(x @ y)
        res = float(np.abs(y - mu * x).max() / abs(x[0]))
        if res <= tol:
            break
        x = B @ x
        x /= np.linalg.norm(x)
    else:
        raise ConvergenceError(f"no convergence in {max_iter} iterations (residual {res:.3g})")
    v = x / x[0]
    resid = float(np.abs(A @ v - mu * v).max())
    return PerronResult(mu, v, resid, it)


@dataclass(frozen=True)
class NormReport:
    norm_squared: float
    reducible: bool
    component_norms: tuple[float, ...]
    certified: bool


def _gram_small(g: BipartiteGraph) -> list[list[int]]:
    n_odd, n_even = g.shape
    return g.gram_odd() if n_odd <= n_even else g.gram_even()


def norm_report(g: BipartiteGraph, tol: float = DEFAULT_TOL, certify: bool = True) -> NormReport:
    """``||Lambda||^2`` per connected component, with an exact cross-check on small sides.

    For components whose smaller side has at most 12 vertices the floating
    value is certified against the integer characteristic polynomial by a
    Sturm count on ``[value - tol, value + tol]``.
    """
    values = []
    certified = True
    for odd_idx, even_idx in g.components():
        sub = g.subgraph(odd_idx, even_idx)
        gram = _gram_small(sub)
        res = perron(np.array(gram, dtype=float), tol=tol)
        val = res.eigenvalue
        if certify and len(gram) <= EXACT_SIDE_LIMIT:
            p = exact.charpoly(gram)
            radius = max(2 * tol * math.sqrt(len(gram)), 8 * np.finfo(float).eps * val)
            if exact.largest_root_bracket(p, val, radius) is None:
                lo, hi = exact.isolate_largest_root(p, Fraction(1, 10**15))
                raise CertificationError(
                    f"power iteration gave {val!r}, exact root in [{float(lo)}, {float(hi)}]")
        else:
            certified = False
        values.append(val)
    return NormReport(max(values), len(values) > 1, tuple(values), certified and certify)


def norm_squared(g: BipartiteGraph, tol: float = DEFAULT_TOL) -> float:
    """Largest eigenvalue of ``Lambda^t Lambda`` (max over components)."""
    return norm_report(g, tol).norm_squared


def fast_norm_squared(g: BipartiteGraph) -> float:
    """Dense symmetric eigensolver; used for bulk enumeration only."""
    gram = np.array(_gram_small(g), dtype=float)
    return float(np.linalg.eigvalsh(gram)[-1])


@dataclass(frozen=True)
class MarkovResidual:
    residual: float
    passed: bool


def verify_markov(g: BipartiteGraph, t, lambda_inv, tol: float = 1e-9) -> MarkovResidual:
    """Relative residual ``||Lambda^t Lambda t - lambda^-1 t||_inf / ||t||_inf``.

    Rational inputs are evaluated exactly.
    """
    t = list(t)
    if len(t) != g.shape[1]:
        raise GraphError("weight vector length != number of even vertices")
    if any(not x > 0 for x in t):
        raise GraphError("weights must be strictly positive")
    gram = g.gram_even()
    exact_mode = all(isinstance(x, (int, Fraction)) for x in t + [lambda_inv])
    if exact_mode:
        t = [Fraction(x) for x in t]
        li = Fraction(lambda_inv)
    else:
        t = [float(x) for x in t]
        li = float(lambda_inv)
    diff = [abs(sum(gram[a][b] * t[b] for b in range(len(t))) - li * t[a]) for a in range(len(t))]
    r = max(diff) / max(t)
    return MarkovResidual(float(r), r <= tol)


class SpectrumVerdict:
    """Classification of a number against ``{4cos^2(pi/n) : n >= 3} U [4, inf)``."""

    __slots__ = ("tag", "witness_n")

    def __init__(self, tag: str, witness_n: int | None = None):
        self.tag = tag
        self.witness_n = witness_n

    def __eq__(self, other):
        return (isinstance(other, SpectrumVerdict)
                and (self.tag, self.witness_n) == (other.tag, other.witness_n))

    def __hash__(self):
        return hash((self.tag, self.witness_n))

    def __repr__(self):
        return f"{self.tag}({self.witness_n})" if self.witness_n is not None else self.tag

    @property
    def in_spectrum(self) -> bool:
        return self.tag != "NotInSpectrum"


def coxeter_value(n: int) -> float:
    return 4 * math.cos(math.pi / n) ** 2


def jones_spectrum_member(alpha: float, tol: float = 1e-9) -> SpectrumVerdict:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if abs(alpha - 4) <= tol:
        return SpectrumVerdict("Four")
    if alpha > 4:
        return SpectrumVerdict("Continuum")
    # 4cos^2(pi/n) = alpha  <=>  n = pi / arccos(sqrt(alpha)/2)
    guess = math.pi / math.acos(min(1.0, math.sqrt(alpha) / 2))
    base = max(3, int(round(guess)))
    cands = [n for n in range(base - 2, base + 3) if n >= 3]
    n = min(cands, key=lambda m: (abs(coxeter_value(m) - alpha), m))
    if abs(coxeter_value(n) - alpha) <= tol:
        return SpectrumVerdict("CoxeterValue", n)
    return SpectrumVerdict("NotInSpectrum")


def markov_weight(g: BipartiteGraph, basepoint: str | None = None, tol: float = DEFAULT_TOL):
    """Pointed Markov weighted graph from the Perron vector of ``Lambda^t Lambda``.

    ``lambda^-1 = ||Lambda||^2`` and ``t_basepoint = 1``.
    """
    from .tower import MarkovWeightedGraph

    if not is_connected(g):
        raise GraphError("markov_weight needs a connected graph")
    bp = basepoint if basepoint is not None else g.even_labels[0]
    res = perron(np.array(g.gram_even(), dtype=float), tol=tol)
    t = res.vector / res.vector[g.even_index(bp)]
    return MarkovWeightedGraph(g, tuple(float(x) for x in t), res.eigenvalue, base=bp,
                               tol=max(10 * tol, 1e-9))
