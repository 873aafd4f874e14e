"""Bipartite inclusion graphs, lazily generated infinite weighted graphs, boundaries.

A :class:`BipartiteGraph` stores the multiplicity matrix ``mult[i][j]`` with
rows indexed by the odd vertices ``I`` and columns by the even vertices ``J``
(for an inclusion ``N`` in ``M`` the rows are the summands of ``N``).

Even-even *connection strengths* ``sum_i b_ij b_ij'`` are the entries of
``Lambda^t Lambda``; boundaries and Markov relations are phrased in them, which
lets finite graphs and the infinite line graphs share one interface.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

MAX_MULTIPLICITY = 2**31 - 1

Vertex = Hashable
VertexSet = frozenset


class GraphError(ValueError):
    """Invalid graph data."""


class MarkovRelationError(ValueError):
    """A weight vector violates the Markov relation at some vertex."""


def _as_label(x) -> str:
    if not isinstance(x, str):
        raise GraphError(f"vertex labels must be strings, got {x!r}")
    return x


@dataclass(frozen=True)
class BipartiteGraph:
    """Finite bipartite multigraph given by its ``I x J`` multiplicity matrix."""

    odd_labels: tuple[str, ...]
    even_labels: tuple[str, ...]
    mult: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        odd = tuple(_as_label(x) for x in self.odd_labels)
        even = tuple(_as_label(x) for x in self.even_labels)
        object.__setattr__(self, "odd_labels", odd)
        object.__setattr__(self, "even_labels", even)
        if len(set(odd)) != len(odd) or len(set(even)) != len(even):
            raise GraphError("duplicate vertex labels")
        if set(odd) & set(even):
            raise GraphError("odd and even labels must be disjoint")
        if not odd or not even:
            raise GraphError("both vertex sets must be nonempty")
        rows = []
        for row in self.mult:
            row = tuple(row)
            if len(row) != len(even):
                raise GraphError("multiplicity matrix has ragged rows")
            clean = []
            for b in row:
                if isinstance(b, bool) or not isinstance(b, (int, np.integer)):
                    if isinstance(b, float) and b.is_integer():
                        b = int(b)
                    else:
                        raise GraphError(f"multiplicities must be integers, got {b!r}")
                b = int(b)
                if b < 0:
                    raise GraphError("multiplicities must be nonnegative")
                if b > MAX_MULTIPLICITY:
                    raise OverflowError(f"multiplicity {b} exceeds 2**31-1")
                clean.append(b)
            rows.append(tuple(clean))
        if len(rows) != len(odd):
            raise GraphError("multiplicity matrix row count != number of odd vertices")
        object.__setattr__(self, "mult", tuple(rows))
        for i, row in enumerate(rows):
            if not any(row):
                raise GraphError(f"odd vertex {odd[i]!r} is isolated")
        for j in range(len(even)):
            if not any(row[j] for row in rows):
                raise GraphError(f"even vertex {even[j]!r} is isolated")

    @classmethod
    def from_matrix(cls, mat, odd: Sequence[str] | None = None,
                    even: Sequence[str] | None = None) -> "BipartiteGraph":
        rows = [list(r) for r in np.atleast_2d(np.asarray(mat, dtype=object))]
        n_odd, n_even = len(rows), len(rows[0]) if rows else 0
        odd = tuple(odd) if odd is not None else tuple(f"i{k}" for k in range(n_odd))
        even = tuple(even) if even is not None else tuple(f"j{k}" for k in range(n_even))
        return cls(odd, even, tuple(tuple(int(b) for b in r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.odd_labels), len(self.even_labels)

    @property
    def matrix(self) -> np.ndarray:
        """Multiplicities as an ``int64`` array (fresh copy)."""
        return np.array(self.mult, dtype=np.int64).reshape(self.shape)

    def exact_matrix(self) -> list[list[int]]:
        return [list(r) for r in self.mult]

    def even_index(self, label: str) -> int:
        try:
            return self.even_labels.index(label)
        except ValueError:
            raise GraphError(f"unknown even vertex {label!r}") from None

    def odd_index(self, label: str) -> int:
        try:
            return self.odd_labels.index(label)
        except ValueError:
            raise GraphError(f"unknown odd vertex {label!r}") from None

    def gram_even(self) -> list[list[int]]:
        """``Lambda^t Lambda`` in exact integers (J x J)."""
        m = self.mult
        nj = len(self.even_labels)
        return [[sum(r[a] * r[b] for r in m) for b in range(nj)] for a in range(nj)]

    def gram_odd(self) -> list[list[int]]:
        """``Lambda Lambda^t`` in exact integers (I x I)."""
        m = self.mult
        return [[sum(x * y for x, y in zip(ra, rb)) for rb in m] for ra in m]

    def strengths(self, j: str) -> dict[str, int]:
        """Nonzero connection strengths from even vertex ``j`` (including itself)."""
        a = self.even_index(j)
        out = {}
        for b, lab in enumerate(self.even_labels):
            s = sum(r[a] * r[b] for r in self.mult)
            if s:
                out[lab] = s
        return out

    def edge_count(self) -> int:
        return sum(1 for r in self.mult for b in r if b)

    def components(self) -> list[tuple[list[int], list[int]]]:
        """Connected components as (odd indices, even indices), in order of first row."""
        n_odd, n_even = self.shape
        seen_odd = [False] * n_odd
        seen_even = [False] * n_even
        comps = []
        for start in range(n_odd):
            if seen_odd[start]:
                continue
            odd_c, even_c = [], []
            queue = deque([("o", start)])
            seen_odd[start] = True
            while queue:
                side, k = queue.popleft()
                if side == "o":
                    odd_c.append(k)
                    for j in range(n_even):
                        if self.mult[k][j] and not seen_even[j]:
                            seen_even[j] = True
                            queue.append(("e", j))
                else:
                    even_c.append(k)
                    for i in range(n_odd):
                        if self.mult[i][k] and not seen_odd[i]:
                            seen_odd[i] = True
                            queue.append(("o", i))
            comps.append((sorted(odd_c), sorted(even_c)))
        return comps

    def subgraph(self, odd_idx: Sequence[int], even_idx: Sequence[int]) -> "BipartiteGraph":
        return BipartiteGraph(
            tuple(self.odd_labels[i] for i in odd_idx),
            tuple(self.even_labels[j] for j in even_idx),
            tuple(tuple(self.mult[i][j] for j in even_idx) for i in odd_idx),
        )


def is_connected(g: BipartiteGraph) -> bool:
    return len(g.components()) == 1


def transpose(g: BipartiteGraph) -> BipartiteGraph:
    """Swap the roles of odd and even vertices."""
    n_odd, n_even = g.shape
    return BipartiteGraph(
        g.even_labels, g.odd_labels,
        tuple(tuple(g.mult[i][j] for i in range(n_odd)) for j in range(n_even)),
    )


def boundary(g, F: Iterable[Vertex]) -> frozenset:
    """``Lambda^t Lambda(F)`` minus ``F`` for a set of even vertices.

    ``g`` is anything exposing ``strengths(j)`` (a :class:`BipartiteGraph`, a
    :class:`LazyWeightedGraph` or a weighted wrapper around either).
    """
    F = frozenset(F)
    if not F:
        raise GraphError("boundary of the empty set is not defined")
    out = set()
    for j in F:
        for k, s in g.strengths(j).items():
            if s and k not in F:
                out.add(k)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Lazy infinite graphs


@dataclass(frozen=True)
class LazyWeightedGraph:
    """Infinite (locally finite) Markov weighted graph given by oracles.

    ``neighbors(j)`` returns the even-even strengths from ``j`` and
    ``weight(j)`` the positive trace weight ``t_j``.  When ``incidence`` is
    provided it returns ``{odd_vertex: multiplicity}`` for an even vertex and
    ``odd_incidence`` the reverse map; these make finite truncations possible.
    """

    basepoint: Vertex
    neighbors: Callable[[Vertex], Mapping[Vertex, int]]
    weight: Callable[[Vertex], object]
    lambda_inv: object
    tol: float = 1e-9
    name: str = "lazy"
    incidence: Callable[[Vertex], Mapping[Vertex, int]] | None = None
    odd_incidence: Callable[[Vertex], Mapping[Vertex, int]] | None = None
    descriptor: dict = field(default_factory=dict)

    def strengths(self, j: Vertex) -> Mapping[Vertex, int]:
        return self.neighbors(j)

    def markov_residual(self, j: Vertex) -> float:
        """Relative residual of ``sum_j' strength(j,j') t_j' = lambda^-1 t_j`` at ``j``."""
        tj = self.weight(j)
        lhs = sum(s * self.weight(k) for k, s in self.neighbors(j).items())
        if not tj:
            return math.inf
        return float(abs(lhs - self.lambda_inv * tj) / tj)  # ratio first: exact weights can exceed float range

    def check_markov(self, vertices: Iterable[Vertex]) -> None:
        for j in vertices:
            if not self.weight(j) > 0:
                raise MarkovRelationError(f"nonpositive weight at {j!r}")
            nb = self.neighbors(j)
            for k, s in nb.items():
                if self.neighbors(k).get(j) != s:
                    raise MarkovRelationError(f"asymmetric strength between {j!r} and {k!r}")
            r = self.markov_residual(j)
            if r > self.tol:
                raise MarkovRelationError(f"Markov residual {r:.3g} at {j!r}")

    def ball(self, radius: int) -> list:
        """Even vertices within ``radius`` strength-steps of the basepoint, BFS order."""
        order = [self.basepoint]
        dist = {self.basepoint: 0}
        queue = deque([self.basepoint])
        while queue:
            v = queue.popleft()
            if dist[v] == radius:
                continue
            for k in sorted(self.neighbors(v), key=_vertex_key):
                if k not in dist:
                    dist[k] = dist[v] + 1
                    order.append(k)
                    queue.append(k)
        return order

    def truncate(self, radius: int) -> "Truncation":
        """Finite bipartite truncation spanned by the even ball of ``radius``."""
        if self.incidence is None or self.odd_incidence is None:
            raise GraphError(f"{self.name} has no incidence oracle; cannot truncate")
        evens = sorted(self.ball(radius), key=_vertex_key)
        even_set = set(evens)
        odds = sorted({i for j in evens for i in self.incidence(j)}, key=_vertex_key)
        mult = tuple(tuple(self.odd_incidence(i).get(j, 0) for j in evens) for i in odds)
        g = BipartiteGraph(tuple(_label(i, "o") for i in odds),
                           tuple(_label(j, "e") for j in evens), mult)
        odd_interior = tuple(all(j in even_set for j in self.odd_incidence(i)) for i in odds)
        odd_in = {i for i, ok in zip(odds, odd_interior) if ok}
        even_interior = tuple(all(i in odd_in for i in self.incidence(j)) for j in evens)
        return Truncation(g, tuple(evens), tuple(odds), even_interior, odd_interior,
                          tuple(self.weight(j) for j in evens))


@dataclass(frozen=True)
class Truncation:
    """Finite piece of an infinite graph with masks of vertices whose neighborhoods are complete."""

    graph: BipartiteGraph
    evens: tuple
    odds: tuple
    even_interior: tuple[bool, ...]
    odd_interior: tuple[bool, ...]
    weights: tuple


def _vertex_key(v):
    return (0, v, "") if isinstance(v, (int, np.integer)) else (1, 0, str(v))


def _label(v, side: str) -> str:
    if side == "e":
        return str(v)
    return f"{v[0]}~{v[1]}" if isinstance(v, tuple) else f"o{v}"


# ---------------------------------------------------------------------------
# Built-in infinite line graphs


def _coerce_lambda_inv(lambda_inv):
    if isinstance(lambda_inv, (int, Fraction)) and not isinstance(lambda_inv, bool):
        return Fraction(lambda_inv)
    if isinstance(lambda_inv, str):
        return Fraction(lambda_inv)
    return float(lambda_inv)


def exact_sqrt(q) -> Fraction | None:
    """Square root of a nonnegative rational when it is rational, else ``None``."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


class _Recurrence:
    """Memoized three-term recurrence ``t[k+1] = c*t[k] - t[k-1]`` on a half line."""

    def __init__(self, t0, t1, c):
        self.values = [t0, t1]
        self.c = c

    def __call__(self, k: int):
        if k < 0:
            raise GraphError(f"vertex {k} outside the half line")
        vals = self.values
        while len(vals) <= k:
            nxt = self.c * vals[-1] - vals[-2]
            if isinstance(nxt, float) and not math.isfinite(nxt):
                raise OverflowError("weight recurrence overflowed; pass an exact lambda_inv")
            vals.append(nxt)
        return vals[k]


def a_infinity(lambda_inv) -> LazyWeightedGraph:
    """Half-line ``A_infinity`` with evens ``0, 1, 2, ...`` and basepoint ``0``.

    Even ``k`` meets odd vertices ``k-1`` (if ``k >= 1``) and ``k``; weights
    solve ``t_0 + t_1 = lambda^-1`` and ``t_{k-1} + 2 t_k + t_{k+1} = lambda^-1 t_k``.
    Positive solutions exist only for ``lambda^-1 >= 4``.
    """
    li = _coerce_lambda_inv(lambda_inv)
    if li < 4:
        raise GraphError("A_infinity carries positive Markov weights only for lambda^-1 >= 4")
    one = Fraction(1) if isinstance(li, Fraction) else 1.0
    rec = _Recurrence(one, li - 1, li - 2)

    def neighbors(k):
        if k == 0:
            return {0: 1, 1: 1}
        return {k - 1: 1, k: 2, k + 1: 1}

    def incidence(k):
        return {k: 1} if k == 0 else {k - 1: 1, k: 1}

    def odd_incidence(i):
        return {i: 1, i + 1: 1}

    return LazyWeightedGraph(0, neighbors, rec, li, name="A_inf", incidence=incidence,
                             odd_incidence=odd_incidence,
                             descriptor={"builtin": "a_inf", "lambda_inv": str(li)})


def a_two_sided(lambda_inv) -> LazyWeightedGraph:
    """Two-sided line ``A_{-inf,inf}`` with evens in ``Z`` and basepoint ``0``.

    The weights are the geometric solution ``t_n = r^n`` with
    ``r + 1/r + 2 = lambda^-1`` and ``r >= 1``; ``r = (1-t)/t`` where
    ``t(1-t) = lambda``.  At ``lambda^-1 = 4`` all weights equal 1.
    """
    li = _coerce_lambda_inv(lambda_inv)
    if li < 4:
        raise GraphError("A_{-inf,inf} carries positive Markov weights only for lambda^-1 >= 4")
    c = li - 2
    disc = c * c - 4
    if isinstance(li, Fraction):
        root = exact_sqrt(disc)
        r = (c + root) / 2 if root is not None else (float(c) + math.sqrt(float(disc))) / 2
    else:
        r = (c + math.sqrt(max(disc, 0.0))) / 2

    def weight(n):
        return r ** n

    def neighbors(n):
        return {n - 1: 1, n: 2, n + 1: 1}

    def incidence(n):
        return {(n - 1, n): 1, (n, n + 1): 1}

    def odd_incidence(e):
        return {e[0]: 1, e[1]: 1}

    if isinstance(r, float):
        li = float(li)
    return LazyWeightedGraph(0, neighbors, weight, li, name="A_two_sided",
                             incidence=incidence, odd_incidence=odd_incidence,
                             descriptor={"builtin": "a_two_sided", "lambda_inv": str(lambda_inv)})


def d_infinity(lambda_inv) -> LazyWeightedGraph:
    """``D_infinity``: two fork leaves ``0`` (basepoint) and ``-1`` on a common odd
    vertex, followed by the arm of evens ``1, 2, 3, ...``.

    The fork vertex ``c`` joins ``0``, ``-1`` and ``1``; the odd vertex ``k``
    (``k >= 1``) joins evens ``k`` and ``k+1``.  Weights are symmetric on the
    fork: ``t_0 = t_{-1} = 1``, ``t_1 = lambda^-1 - 2`` and then the arm recurrence.
    """
    li = _coerce_lambda_inv(lambda_inv)
    if li < 4:
        raise GraphError("D_infinity carries positive Markov weights only for lambda^-1 >= 4")
    one = Fraction(1) if isinstance(li, Fraction) else 1.0
    t1 = li - 2
    arm = _Recurrence(t1, (li - 2) * t1 - 2, li - 2)

    def weight(k):
        return one if k in (0, -1) else arm(k - 1)

    def neighbors(k):
        if k in (0, -1):
            return {0: 1, -1: 1, 1: 1}
        if k == 1:
            return {0: 1, -1: 1, 1: 2, 2: 1}
        return {k - 1: 1, k: 2, k + 1: 1}

    def incidence(k):
        if k in (0, -1):
            return {"c": 1}
        if k == 1:
            return {"c": 1, 1: 1}
        return {k - 1: 1, k: 1}

    def odd_incidence(i):
        if i == "c":
            return {0: 1, -1: 1, 1: 1}
        return {i: 1, i + 1: 1}

    return LazyWeightedGraph(0, neighbors, weight, li, name="D_inf", incidence=incidence,
                             odd_incidence=odd_incidence,
                             descriptor={"builtin": "d_inf", "lambda_inv": str(li)})


BUILTINS = {"a_inf": a_infinity, "a_two_sided": a_two_sided, "d_inf": d_infinity}


# ---------------------------------------------------------------------------
# Finite weighted graphs sharing the lazy interface


@dataclass(frozen=True)
class WeightedGraph:
    """A finite graph with a positive weight per even vertex (no Markov guarantee)."""

    graph: BipartiteGraph
    weights: tuple
    lambda_inv: object = None

    def __post_init__(self):
        w = tuple(self.weights)
        if len(w) != len(self.graph.even_labels):
            raise GraphError("weight vector length != number of even vertices")
        if any(not x > 0 for x in w):
            raise GraphError("weights must be strictly positive")
        object.__setattr__(self, "weights", w)

    @property
    def basepoint(self):
        return self.graph.even_labels[0]

    def weight(self, j):
        return self.weights[self.graph.even_index(j)]

    def strengths(self, j):
        return self.graph.strengths(j)

    neighbors = strengths

    def ball(self, radius: int) -> list:
        order, dist = [self.basepoint], {self.basepoint: 0}
        queue = deque(order)
        while queue:
            v = queue.popleft()
            if dist[v] == radius:
                continue
            for k in self.graph.even_labels:
                if k in self.strengths(v) and k not in dist:
                    dist[k] = dist[v] + 1
                    order.append(k)
                    queue.append(k)
        return order

    @property
    def descriptor(self):
        return {"finite": True}
