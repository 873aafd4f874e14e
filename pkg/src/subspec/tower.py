"""Graph-level Jones towers: basic construction steps, Bratteli data, coupling vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph_core import (BipartiteGraph, GraphError, LazyWeightedGraph, Truncation, WeightedGraph,
                         _label, is_connected, transpose)
from .spectral import DEFAULT_TOL, norm_squared, perron, verify_markov

MARKOV_TOL = 1e-9


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _inverse(x):
    return 1 / Fraction(x) if _is_exact(x) else 1.0 / float(x)


@dataclass(frozen=True)
class MarkovWeightedGraph(WeightedGraph):
    """Pointed lambda-Markov weighted graph ``(Lambda, j0, t)`` with ``t_{j0} = 1``.

    ``trace_scale`` keeps the un-normalized trace of the basepoint so that
    repeated basic construction steps compose: the actual minimal-projection
    traces are ``trace_scale * weights``.
    """

    base: str | None = None
    trace_scale: object = 1
    tol: float = MARKOV_TOL

    def __post_init__(self):
        super().__post_init__()
        if self.lambda_inv is None:
            raise GraphError("a Markov weighted graph needs lambda_inv")
        if self.base is None:
            object.__setattr__(self, "base", self.graph.even_labels[0])
        w0 = self.weights[self.graph.even_index(self.base)]
        if abs(float(w0) - 1) > self.tol:
            raise GraphError(f"weight at basepoint {self.base!r} is {w0}, expected 1")
        chk = verify_markov(self.graph, self.weights, self.lambda_inv, self.tol)
        if not chk.passed:
            raise GraphError(f"weights violate the Markov relation (residual {chk.residual:.3g})")

    @property
    def basepoint(self):
        return self.base

    @property
    def lam(self):
        return _inverse(self.lambda_inv)

    @property
    def traces(self) -> tuple:
        return tuple(self.trace_scale * w for w in self.weights)


def pointed(g: BipartiteGraph, weights: Sequence, lambda_inv, basepoint: str | None = None,
            tol: float = MARKOV_TOL) -> MarkovWeightedGraph:
    """Renormalize ``weights`` at ``basepoint`` and wrap as a Markov weighted graph."""
    bp = basepoint if basepoint is not None else g.even_labels[0]
    w0 = weights[g.even_index(bp)]
    w = tuple(x / w0 for x in weights)
    return MarkovWeightedGraph(g, w, lambda_inv, base=bp, trace_scale=w0, tol=tol)


def basic_construction_step(m: MarkovWeightedGraph) -> MarkovWeightedGraph:
    """One step up the tower: graph ``Lambda -> Lambda^t``, weights ``t -> lambda * Lambda t``.

    The new even vertices are the old odd ones; the new basepoint is the first
    odd vertex adjacent to the old basepoint.
    """
    g = m.graph
    lam = m.lam
    traces = m.traces
    raw = [lam * sum(row[j] * traces[j] for j in range(len(traces))) for row in g.mult]
    bp_idx = g.even_index(m.base)
    new_bp = next(i for i, row in enumerate(g.mult) if row[bp_idx])
    scale = raw[new_bp]
    w = tuple(x / scale for x in raw)
    return MarkovWeightedGraph(transpose(g), w, m.lambda_inv, base=g.odd_labels[new_bp],
                               trace_scale=scale, tol=m.tol)


@dataclass(frozen=True)
class TowerLevel:
    index: int
    labels: tuple[str, ...]
    dims: tuple[int, ...]
    traces: tuple
    inclusion: str  # name of the matrix carrying this level into the next

    @property
    def total_dimension(self) -> int:
        return sum(d * d for d in self.dims)

    @property
    def state_value(self):
        return sum(d * t for d, t in zip(self.dims, self.traces))


@dataclass(frozen=True)
class BratteliTower:
    base: object  # MarkovWeightedGraph or LazyWeightedGraph
    levels: tuple[TowerLevel, ...]
    graph: BipartiteGraph
    basepoint: str

    @property
    def lambda_inv(self):
        return self.base.lambda_inv

    def total_dimensions(self) -> list[int]:
        return [lv.total_dimension for lv in self.levels]

    def to_json(self) -> dict:
        def num(x):
            return str(x) if isinstance(x, Fraction) else x
        return {
            "lambda_inv": num(self.base.lambda_inv),
            "graph": {"odd": list(self.graph.odd_labels),
                      "even": list(self.graph.even_labels),
                      "mult": [list(r) for r in self.graph.mult]},
            "basepoint": self.basepoint,
            "levels": [{"level": lv.index, "labels": list(lv.labels), "dims": list(lv.dims),
                        "total_dimension": lv.total_dimension,
                        "traces": [num(t) for t in lv.traces],
                        "inclusion_to_next": lv.inclusion} for lv in self.levels],
        }


def build_tower(m, depth: int) -> BratteliTower:
    """Levels ``0..depth`` of the lambda-sequence of inclusions of a pointed Markov graph.

    Even levels live on the even vertices ``J`` with traces ``lambda^n t``;
    odd levels on ``I`` with traces ``lambda^(n+1) s``, ``s = Lambda t``, so that
    each level's trace is a state.  Dimension vectors count paths from the
    basepoint in exact integers.  A :class:`LazyWeightedGraph` is truncated
    far enough that no path of length ``depth`` sees the cut.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(m, LazyWeightedGraph):
        tr = m.truncate(depth // 2 + 1)
        g, t, lam = tr.graph, tr.weights, _inverse(m.lambda_inv)
        base = _label(m.basepoint, "e")
    else:
        g, t, lam, base = m.graph, m.weights, m.lam, m.base
    s = [sum(row[j] * t[j] for j in range(len(t))) for row in g.mult]
    d = [0] * len(g.even_labels)
    d[g.even_index(base)] = 1
    levels = []
    for n in range(depth + 1):
        if n % 2 == 0:
            k = n // 2
            traces = tuple(lam ** k * x for x in t)
            levels.append(TowerLevel(n, g.even_labels, tuple(d), traces, "Lambda^t"))
            d = [sum(row[j] * d[j] for j in range(len(d))) for row in g.mult]
        else:
            k = (n + 1) // 2
            traces = tuple(lam ** k * x for x in s)
            levels.append(TowerLevel(n, g.odd_labels, tuple(d), traces, "Lambda"))
            d = [sum(g.mult[i][j] * d[i] for i in range(len(d))) for j in range(len(g.even_labels))]
    return BratteliTower(m, tuple(levels), g, base)


@dataclass(frozen=True)
class GrowthEstimate:
    rate: float
    norm_squared: float
    level: int


def growth_rate(tw: BratteliTower) -> GrowthEstimate:
    """``(dim_n / dim_{n-2})^{1/2}`` at the deepest level; tends to ``||Lambda||^2``."""
    if len(tw.levels) < 6:
        raise ValueError("growth_rate needs at least 6 levels")
    dims = tw.total_dimensions()
    n = len(dims) - 1
    rate = math.sqrt(dims[n] / dims[n - 2])
    return GrowthEstimate(rate, norm_squared(tw.graph), n)


@dataclass(frozen=True)
class CouplingReport:
    residual_dN: float
    residual_eigen: float
    passed: bool
    even_interior: tuple[bool, ...] = ()
    odd_interior: tuple[bool, ...] = ()


def coupling_check(g, d_M: Sequence, d_N: Sequence, index, tol: float = 1e-8,
                   even_interior: Sequence[bool] | None = None,
                   odd_interior: Sequence[bool] | None = None) -> CouplingReport:
    """Residuals of ``d_N = Lambda d_M`` and ``Lambda^t Lambda d_M = index * d_M``.

    ``g`` may be a :class:`Truncation`, whose interior masks then restrict the
    residuals to vertices with complete neighborhoods.
    """
    if isinstance(g, Truncation):
        even_interior = g.even_interior if even_interior is None else even_interior
        odd_interior = g.odd_interior if odd_interior is None else odd_interior
        g = g.graph
    n_odd, n_even = g.shape
    if len(d_M) != n_even or len(d_N) != n_odd:
        raise GraphError(f"dimension mismatch: graph {g.shape}, d_M {len(d_M)}, d_N {len(d_N)}")
    even_mask = np.ones(n_even, bool) if even_interior is None else np.asarray(even_interior, bool)
    odd_mask = np.ones(n_odd, bool) if odd_interior is None else np.asarray(odd_interior, bool)
    L = g.matrix.astype(float)
    dm = np.array([float(x) for x in d_M])
    dn = np.array([float(x) for x in d_N])
    if (dm <= 0).any() or (dn <= 0).any():
        raise GraphError("coupling vectors must be positive")
    idx = float(index)
    r1 = np.abs(L @ dm - dn)[odd_mask]
    r2 = np.abs(L.T @ (L @ dm) - idx * dm)[even_mask]
    res_dn = float(r1.max() / np.abs(dn[odd_mask]).max()) if r1.size else 0.0
    res_eig = float(r2.max() / np.abs(dm[even_mask]).max()) if r2.size else 0.0
    return CouplingReport(res_dn, res_eig, res_dn <= tol and res_eig <= tol,
                          tuple(bool(x) for x in even_mask), tuple(bool(x) for x in odd_mask))


@dataclass(frozen=True)
class StandardWeights:
    v: tuple[float, ...]
    u: tuple[float, ...]
    lambda_inv: float
    # u at the odd vertex next to the basepoint when normalized as sqrt(index)
    u_first_index_normalized: float = field(default=float("nan"))


def standard_weights(gamma: BipartiteGraph, basepoint: str | None = None,
                     tol: float = DEFAULT_TOL) -> StandardWeights:
    """Standard vectors of a principal graph whose even vertices ``K`` are ``gamma``'s evens.

    ``v`` is the Perron vector of ``Gamma Gamma^t`` with ``v_* = 1``, ``u = Gamma^t v``
    and ``lambda^-1 = ||Gamma||^2``.  Both ``u_{l1}`` as computed and the
    alternative ``[M:N]^{1/2}`` are returned; they need not agree.
    """
    if not is_connected(gamma):
        raise GraphError("standard graph must be connected")
    bp = basepoint if basepoint is not None else gamma.even_labels[0]
    res = perron(np.array(gamma.gram_even(), dtype=float), tol=tol)
    v = res.vector / res.vector[gamma.even_index(bp)]
    u = gamma.matrix.astype(float) @ v
    return StandardWeights(tuple(float(x) for x in v), tuple(float(x) for x in u),
                           res.eigenvalue, math.sqrt(res.eigenvalue))
