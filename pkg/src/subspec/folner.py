"""Følner sets for Markov weighted graphs.

A finite set ``F`` of even vertices passes at ``epsilon`` when
``||t|_dF||_2 < epsilon ||t|_F||_2`` with ``dF`` the vertices outside ``F``
joined to ``F`` by a nonzero connection strength.  Such sets exist for every
``epsilon`` exactly when ``||Lambda||^2 = lambda^-1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graph_core import (BipartiteGraph, GraphError, LazyWeightedGraph, MarkovRelationError, boundary,
                         exact_sqrt)

DEFAULT_MAX_SIZE = 10_000
START_RADIUS = 16
TIE_RTOL = 1e-12
DENSE_LIMIT = 2000


def _exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _log(x) -> float:
    """Natural log of a positive int, Fraction or float without overflow."""
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def _sqrt_float(q) -> float:
    if q == 0:
        return 0.0
    if isinstance(q, Fraction):
        r = exact_sqrt(q)
        if r is not None:
            return float(r)
    try:
        return math.sqrt(float(q))
    except OverflowError:
        return math.exp(0.5 * _log(q))


def _weight_fn(g):
    if isinstance(g, BipartiteGraph):
        raise GraphError("Følner checks need a weighted graph")
    return g.weight


@dataclass(frozen=True)
class FolnerCertificate:
    """Outcome of checking one set; ``passed`` means ``ratio < epsilon`` held (exactly when possible)."""

    F: frozenset
    epsilon: float
    boundary: frozenset
    boundary_norm: float
    bulk_norm: float
    ratio: float
    passed: bool
    exact: bool
    boundary_sq: object = None
    bulk_sq: object = None

    def to_json(self, graph_fingerprint: str | None = None) -> dict:
        def key(v):
            if isinstance(v, int):
                return (0, v, "")
            return (0, int(v), "") if v.lstrip("-").isdigit() else (1, 0, v)
        out = {"F": sorted(self.F, key=key), "epsilon": self.epsilon,
               "boundary": sorted(self.boundary, key=key),
               "boundary_norm": self.boundary_norm, "bulk_norm": self.bulk_norm,
               "ratio": self.ratio, "passed": self.passed, "exact": self.exact}
        if graph_fingerprint is not None:
            out["graph_fingerprint"] = graph_fingerprint
        return out


def certificate_check(g, F: Iterable, epsilon: float) -> FolnerCertificate:
    """Evaluate both norms and the strict inequality; exact for rational weights."""
    F = frozenset(F)
    if not F:
        raise GraphError("F must be nonempty")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    w = _weight_fn(g)
    dF = boundary(g, F)
    tF = [w(j) for j in F]
    tB = [w(j) for j in dF]
    exact = all(_exact(x) for x in tF + tB)
    if exact:
        bulk = sum(Fraction(x) ** 2 for x in tF)
        bnd = sum((Fraction(x) ** 2 for x in tB), Fraction(0))
        eps = Fraction(epsilon) if not isinstance(epsilon, str) else Fraction(epsilon)
        passed = bnd < eps * eps * bulk
        ratio = _sqrt_float(bnd / bulk) if bnd else 0.0
        return FolnerCertificate(F, float(epsilon), dF, _sqrt_float(bnd), _sqrt_float(bulk), ratio,
                                 bool(passed), True, bnd, bulk)
    bulk = math.fsum(float(x) ** 2 for x in tF)
    bnd = math.fsum(float(x) ** 2 for x in tB)
    ratio = math.sqrt(bnd / bulk)
    return FolnerCertificate(F, float(epsilon), dF, math.sqrt(bnd), math.sqrt(bulk), ratio,
                             ratio < epsilon, False, bnd, bulk)


@dataclass(frozen=True)
class SearchOutcome:
    """``tag`` is ``"Certificate"`` or ``"Exhausted"``."""

    tag: str
    certificate: FolnerCertificate | None = None
    frontier_size: int = 0
    best_ratio: float = math.inf
    best_size: int = 0
    delta: float | None = None
    radii: tuple[int, ...] = field(default=())

    @property
    def found(self) -> bool:
        return self.tag == "Certificate"

    def to_json(self, graph_fingerprint: str | None = None) -> dict:
        out = {"outcome": self.tag, "frontier_size": self.frontier_size,
               "best_ratio": self.best_ratio, "best_size": self.best_size}
        if self.delta is not None:
            out["delta"] = self.delta
        if self.radii:
            out["radii"] = list(self.radii)
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json(graph_fingerprint)
        return out


def _log_ratio(log_bnd_sq: float, log_bulk_sq: float) -> float:
    return math.exp(0.5 * (log_bnd_sq - log_bulk_sq)) if log_bnd_sq > -math.inf else 0.0


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    m = max(a, b)
    return m + math.log(math.exp(a - m) + math.exp(b - m))


def interval_search(g, epsilon: float, max_size: int = DEFAULT_MAX_SIZE) -> SearchOutcome:
    """Scan growing BFS balls around the basepoint; the boundary of a ball is the next BFS layer."""
    w = _weight_fn(g)
    seen = {g.basepoint}
    layer = [g.basepoint]
    log_bulk = -math.inf
    best = (math.inf, 0)
    size = 0
    while layer and size + len(layer) <= max_size:
        for v in layer:
            log_bulk = _logaddexp(log_bulk, 2 * _log(w(v)))
        size += len(layer)
        nxt = []
        for v in layer:
            for k, s in g.strengths(v).items():
                if s and k not in seen:
                    seen.add(k)
                    nxt.append(k)
        log_bnd = -math.inf
        for k in nxt:
            log_bnd = _logaddexp(log_bnd, 2 * _log(w(k)))
        ratio = _log_ratio(log_bnd, log_bulk)
        if ratio < best[0]:
            best = (ratio, size)
        if ratio < epsilon * (1 + 1e-9):
            F = seen - set(nxt)
            cert = certificate_check(g, F, epsilon)
            if cert.passed:
                return SearchOutcome("Certificate", cert, size, cert.ratio, size)
        layer = nxt
    return SearchOutcome("Exhausted", None, size, best[0], best[1])


def _perron_vector(vertices, index, g) -> np.ndarray:
    """Perron vector of the connection-strength matrix restricted to ``vertices``."""
    n = len(vertices)
    rows, cols, vals = [], [], []
    banded = True
    for a, v in enumerate(vertices):
        for k, s in g.strengths(v).items():
            b = index.get(k)
            if b is not None and s:
                rows.append(a)
                cols.append(b)
                vals.append(float(s))
                if abs(a - b) > 1:
                    banded = False
    if n == 1:
        return np.ones(1)
    if banded:
        from scipy.linalg import eigh_tridiagonal

        d = np.zeros(n)
        e = np.zeros(n - 1)
        for a, b, s in zip(rows, cols, vals):
            if a == b:
                d[a] = s
            elif b == a + 1:
                e[a] = s
        _, vec = eigh_tridiagonal(d, e, select="i", select_range=(n - 1, n - 1))
        x = vec[:, 0]
    elif n <= DENSE_LIMIT:
        S = np.zeros((n, n))
        S[rows, cols] = vals
        x = np.linalg.eigh(S)[1][:, -1]
    else:
        from scipy.sparse import csr_matrix
        from scipy.sparse.linalg import eigsh

        S = csr_matrix((vals, (rows, cols)), shape=(n, n))
        x = eigsh(S, k=1, which="LA", tol=1e-13)[1][:, 0]
    return x if x.sum() >= 0 else -x


def _check_markov(g, vertices) -> None:
    if isinstance(g, LazyWeightedGraph):
        g.check_markov(vertices)
        return
    from .spectral import verify_markov

    if g.lambda_inv is None:
        raise MarkovRelationError("graph has no lambda_inv")
    if not verify_markov(g.graph, g.weights, g.lambda_inv, getattr(g, "tol", 1e-9)).passed:
        raise MarkovRelationError("weights violate the Markov relation")


def _ball_sorted(g, radius):
    from .graph_core import _vertex_key

    return sorted(g.ball(radius), key=_vertex_key)


def _scan_level_sets(g, vertices, epsilon):
    """Best prefix of ``vertices`` ordered by ``b = b0 / t`` (descending), ties grouped."""
    w = _weight_fn(g)
    index = {v: a for a, v in enumerate(vertices)}
    b0 = _perron_vector(vertices, index, g)
    logt = {}

    def lt(v):
        if v not in logt:
            logt[v] = _log(w(v))
        return logt[v]

    logb = np.array([math.log(x) - lt(v) if x > 0 else -math.inf for x, v in zip(b0, vertices)])
    order = sorted(range(len(vertices)), key=lambda a: (-logb[a], a))
    # squared weights are kept relative to a running reference scale R (the
    # largest log-weight seen so far), so small early prefixes keep full precision
    R = lt(vertices[order[0]])
    inF = set()
    nbr = {}
    n_bnd = 0
    bulk = 0.0
    bnd = 0.0
    best = (math.inf, 0, 0)  # ratio, |F|, prefix length

    def rescale(v):
        nonlocal R, bulk, bnd
        if lt(v) > R:
            f = math.exp(2 * (R - lt(v)))
            bulk *= f
            bnd *= f
            R = lt(v)

    def sq(v):
        return math.exp(2 * (lt(v) - R))

    k = 0
    N = len(order)
    while k < N:
        grp = [order[k]]
        while k + len(grp) < N and (logb[order[k]] - logb[order[k + len(grp)]]
                                    <= TIE_RTOL * max(1.0, abs(logb[order[k]]))):
            grp.append(order[k + len(grp)])
        for a in grp:
            v = vertices[a]
            rescale(v)
            if nbr.get(v, 0) > 0:
                bnd -= sq(v)
                n_bnd -= 1
            inF.add(v)
            bulk += sq(v)
            for u, s in g.strengths(v).items():
                if not s or u == v:
                    continue
                c = nbr.get(u, 0)
                nbr[u] = c + 1
                if c == 0 and u not in inF:
                    rescale(u)
                    bnd += sq(u)
                    n_bnd += 1
        if n_bnd == 0:
            bnd = 0.0
        k += len(grp)
        ratio = math.sqrt(max(bnd, 0.0) / bulk) if bulk > 0 else math.inf
        if ratio < best[0]:
            best = (ratio, len(inF), k)
    return best, order


def spectral_cut_search(g, epsilon: float, max_size: int = DEFAULT_MAX_SIZE,
                        start_radius: int = START_RADIUS) -> SearchOutcome:
    """Level sets of the Perron vector of a finite truncation, scaled by the weights.

    The truncation grows by radius doubling from ``start_radius``; the last
    radius is cut back so that at most ``max_size`` vertices are used.  Among
    the level sets ``{b >= c}`` the one with the smallest ratio (then the
    smallest size) is kept, and a certificate is returned when it passes
    the exact check.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    li = g.lambda_inv
    lam = 1 / float(li)
    delta = (lam ** 4 * epsilon ** 2) ** 4
    finite = not isinstance(g, LazyWeightedGraph)
    radius = start_radius
    radii = []
    best_overall = (math.inf, 0)
    frontier = 0
    while True:
        if finite:
            vertices = list(g.graph.even_labels)
        else:
            vertices = _ball_sorted(g, radius)
            if len(vertices) > max_size:
                lo, hi = radius // 2 if radii else 0, radius
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if len(g.ball(mid)) <= max_size:
                        lo = mid
                    else:
                        hi = mid
                if radii and lo <= radii[-1]:
                    break
                radius = lo
                vertices = _ball_sorted(g, radius)
        _check_markov(g, vertices if not finite else ())
        radii.append(radius)
        frontier = len(vertices)
        (ratio, size, k), order = _scan_level_sets(g, vertices, epsilon)
        if (ratio, size) < best_overall:
            best_overall = (ratio, size)
        if ratio < epsilon * (1 + 1e-9):
            F = [vertices[a] for a in order[:k]]
            cert = certificate_check(g, F, epsilon)
            if cert.passed:
                return SearchOutcome("Certificate", cert, frontier, cert.ratio, len(F), delta, tuple(radii))
        if finite or frontier >= max_size:
            break
        radius *= 2
    return SearchOutcome("Exhausted", None, frontier, best_overall[0], best_overall[1], delta, tuple(radii))


def norm_bound_from_certificate(g, cert: FolnerCertificate) -> float:
    """``lambda^-1 ||t_F|| / ||t_F'||`` with ``F' = F cup dF``, a lower bound for ``||Lambda||^2``."""
    li = g.lambda_inv
    if li is None:
        raise GraphError("graph has no lambda_inv")
    if cert.exact and cert.bulk_sq is not None:
        q = Fraction(cert.boundary_sq) / Fraction(cert.bulk_sq)
        if q == 0:
            return float(li)
        return float(li) / math.sqrt(1 + float(q))
    return float(li) / math.sqrt(1 + cert.ratio ** 2)


def graph_fingerprint(g) -> str:
    from .io import fingerprint, serialize_graph

    if isinstance(g, LazyWeightedGraph):
        desc = dict(g.descriptor) or {"name": g.name}
        return fingerprint(json.dumps(desc, sort_keys=True, default=str))
    return fingerprint(serialize_graph(g))
