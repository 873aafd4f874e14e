"""Enumeration of small connected bipartite multigraphs and the atlas of their square norms.

Graphs are kept as canonical multiplicity matrices.  The canonical form is
the lexicographically smallest ``(shape, entries)`` key over the orderings
produced by colour refinement with individualization, in both orientations.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import exact
from .graph_core import BipartiteGraph

GOLDEN_BOUND = 2 + math.sqrt(5)
BOUNDARY_BAND = 1e-6
DEDUP_TOL = 1e-9
DEFAULT_CAP = 2_000_000

Matrix = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# canonical form


def _refine(M: Matrix, rc: list[int], cc: list[int]) -> tuple[list[int], list[int]]:
    """Equitable refinement; colours are ranks of invariant signatures."""
    nr, nc = len(M), len(M[0])
    while True:
        rs = [(rc[i], tuple(sorted((cc[j], M[i][j]) for j in range(nc) if M[i][j]))) for i in range(nr)]
        cs = [(cc[j], tuple(sorted((rc[i], M[i][j]) for i in range(nr) if M[i][j]))) for j in range(nc)]
        rrank = {s: k for k, s in enumerate(sorted(set(rs)))}
        crank = {s: k for k, s in enumerate(sorted(set(cs)))}
        nrc = [rrank[s] for s in rs]
        ncc = [crank[s] for s in cs]
        if len(rrank) == len(set(rc)) and len(crank) == len(set(cc)):
            return nrc, ncc
        rc, cc = nrc, ncc


def _individualize(colours: list[int], v: int) -> list[int]:
    # v gets a colour just below the rest of its cell; doubling keeps ranks distinct
    return [2 * c + (0 if k == v else 1) if c == colours[v] else 2 * c + (1 if c > colours[v] else 0)
            for k, c in enumerate(colours)]


def _search(M: Matrix, rc, cc, best: list) -> None:
    rc, cc = _refine(M, rc, cc)
    nr, nc = len(M), len(M[0])
    if len(set(rc)) == nr and len(set(cc)) == nc:
        rows = sorted(range(nr), key=lambda i: rc[i])
        cols = sorted(range(nc), key=lambda j: cc[j])
        key = tuple(M[i][j] for i in rows for j in cols)
        if best[0] is None or key < best[0]:
            best[0] = key
        return
    # first non-singleton cell: rows before columns, lowest colour first
    for side, colours in ((0, rc), (1, cc)):
        counts: dict[int, int] = {}
        for c in colours:
            counts[c] = counts.get(c, 0) + 1
        multi = sorted(c for c, n in counts.items() if n > 1)
        if multi:
            cell = [k for k, c in enumerate(colours) if c == multi[0]]
            break
    tried = set()
    for v in cell:
        # twins (identical rows/columns) give the same subtree
        sig = M[v] if side == 0 else tuple(r[v] for r in M)
        if sig in tried:
            continue
        tried.add(sig)
        if side == 0:
            _search(M, _individualize(rc, v), cc, best)
        else:
            _search(M, rc, _individualize(cc, v), best)


def _canonical_oriented(M: Matrix) -> tuple:
    best = [None]
    _search(M, [0] * len(M), [0] * len(M[0]), best)
    return (len(M), len(M[0])), best[0]


@lru_cache(maxsize=1 << 18)
def canonical_key(M: Matrix) -> tuple:
    """``((rows, cols), flat entries)``, minimal over both orientations."""
    T = tuple(zip(*M))
    return min(_canonical_oriented(M), _canonical_oriented(T))


def _key_matrix(key) -> Matrix:
    (r, c), flat = key
    return tuple(tuple(flat[i * c:(i + 1) * c]) for i in range(r))


@dataclass(frozen=True)
class CanonicalGraph:
    mult: Matrix
    norm_squared: float = field(default=math.nan, compare=False)
    error_bound: float = field(default=math.nan, compare=False)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.mult), len(self.mult[0])

    @property
    def vertices(self) -> int:
        return sum(self.shape)

    @property
    def edges(self) -> int:
        return sum(x for r in self.mult for x in r)

    @property
    def key(self) -> tuple:
        return self.shape, tuple(x for r in self.mult for x in r)

    @property
    def digest(self) -> str:
        return hashlib.sha256(json.dumps([list(r) for r in self.mult]).encode()).hexdigest()[:16]

    def to_graph(self) -> BipartiteGraph:
        return BipartiteGraph.from_matrix([list(r) for r in self.mult])


def canonical(g) -> CanonicalGraph:
    """Canonical form of a :class:`BipartiteGraph`, a :class:`CanonicalGraph` or a nested list."""
    if isinstance(g, CanonicalGraph):
        M = g.mult
    elif isinstance(g, BipartiteGraph):
        M = g.mult
    else:
        M = tuple(tuple(int(x) for x in r) for r in g)
    M = tuple(tuple(r) for r in M)
    return CanonicalGraph(_key_matrix(canonical_key(M)))


# ---------------------------------------------------------------------------
# norms and classes


def _norm_float(M: Matrix) -> float:
    A = np.array(M, dtype=float)
    G = A @ A.T if A.shape[0] <= A.shape[1] else A.T @ A
    return float(np.linalg.eigvalsh(G)[-1])


def _gram_small(M: Matrix) -> list[list[int]]:
    r, c = len(M), len(M[0])
    if r <= c:
        return [[sum(M[a][k] * M[b][k] for k in range(c)) for b in range(r)] for a in range(r)]
    return [[sum(M[k][a] * M[k][b] for k in range(r)) for b in range(c)] for a in range(c)]


def with_norm(cg: CanonicalGraph) -> CanonicalGraph:
    val = _norm_float(cg.mult)
    return CanonicalGraph(cg.mult, val, 64 * np.finfo(float).eps * max(1.0, val) * cg.vertices)


CLASSES = ("Coxeter", "Affine", "Window", "HalfLine")


def classify_norm(cg: CanonicalGraph) -> str:
    """Coxeter (< 4), Affine (= 4), Window ((4, 2+sqrt5]) or HalfLine (> 2+sqrt5).

    Decided from the floating value away from the two boundaries and by exact
    Sturm counts on the integer characteristic polynomial within ``1e-6`` of them.
    """
    val = cg.norm_squared if not math.isnan(cg.norm_squared) else _norm_float(cg.mult)
    seq = None

    def sturm():
        nonlocal seq
        if seq is None:
            seq = exact.sturm_sequence(exact.charpoly(_gram_small(cg.mult)))
        return seq

    if abs(val - 4) <= BOUNDARY_BAND:
        s = sturm()
        if exact.count_roots_above(s, 4) == 0:
            return "Affine" if exact.poly_eval(s[0], 4) == 0 else "Coxeter"
        return "Window"
    if val < 4:
        return "Coxeter"
    if abs(val - GOLDEN_BOUND) <= BOUNDARY_BAND:
        s = sturm()
        return "Window" if exact.count_roots_above_qsqrt5(s, 2, 1) == 0 else "HalfLine"
    return "Window" if val < GOLDEN_BOUND else "HalfLine"


def dynkin_label(cg: CanonicalGraph) -> str | None:
    """``A_n``, ``D_n``, ``E_n`` (including the extended ``E_n``, ``n >= 9``) for simple trees; else ``None``."""
    M = cg.mult
    if any(x > 1 for r in M for x in r):
        return None
    n = cg.vertices
    r, c = cg.shape
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for i in range(r):
        for j in range(c):
            if M[i][j]:
                adj[i].append(r + j)
                adj[r + j].append(i)
    if sum(len(a) for a in adj.values()) // 2 != n - 1:
        return None
    degs = [len(adj[v]) for v in range(n)]
    if max(degs) <= 2:
        return f"A{n}"
    branch = [v for v in range(n) if degs[v] >= 3]
    if len(branch) != 1 or degs[branch[0]] != 3:
        return None
    b = branch[0]
    arms = []
    for start in adj[b]:
        length, prev, cur = 1, b, start
        while degs[cur] == 2:
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            prev, cur = cur, nxt
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    if arms[0] == 1 and arms[1] == 2:
        return f"E{n}"
    return None


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class EnumerationResult:
    graphs: tuple[CanonicalGraph, ...]
    truncated: bool
    counts: dict

    def __iter__(self) -> Iterator[CanonicalGraph]:
        return iter(self.graphs)

    def __len__(self) -> int:
        return len(self.graphs)


def _nonzero(M: Matrix) -> int:
    return sum(1 for r in M for x in r if x)


def _extensions(M: Matrix, max_mult: int) -> Iterator[Matrix]:
    r, c = len(M), len(M[0])
    for vec in product(range(max_mult + 1), repeat=c):
        if any(vec):
            yield M + (vec,)
    for vec in product(range(max_mult + 1), repeat=r):
        if any(vec):
            yield tuple(row + (x,) for row, x in zip(M, vec))


@lru_cache(maxsize=32)
def _levels(max_vertices: int, max_mult: int, max_edges: int | None, cap: int):
    levels: list[list[tuple]] = []
    truncated = False
    current = [canonical_key(((m,),)) for m in range(1, max_mult + 1)] if max_vertices >= 2 else []
    total = len(current)
    if current:
        levels.append(sorted(current))
    for _ in range(3, max_vertices + 1):
        nxt = set()
        for key in levels[-1]:
            for M in _extensions(_key_matrix(key), max_mult):
                if max_edges is not None and _nonzero(M) > max_edges:
                    continue
                nxt.add(canonical_key(M))
                if total + len(nxt) >= cap:
                    truncated = True
                    break
            if truncated:
                break
        total += len(nxt)
        levels.append(sorted(nxt))
        if truncated:
            break
    return tuple(tuple(lv) for lv in levels), truncated


def enumerate_graphs(max_vertices: int, max_multiplicity: int = 1, max_edges: int | None = None,
                     cap: int = DEFAULT_CAP) -> EnumerationResult:
    """Every connected bipartite multigraph with at most ``max_vertices`` vertices, once each.

    Vertex augmentation: a connected graph on ``n + 1`` vertices arises from one on
    ``n`` vertices by adding a row or a column (remove any non-cut vertex).
    ``max_edges`` bounds the number of adjacent vertex pairs.
    """
    if max_vertices < 1 or max_multiplicity < 1 or (max_edges is not None and max_edges < 1):
        raise ValueError("bounds must be >= 1")
    levels, truncated = _levels(max_vertices, max_multiplicity, max_edges, cap)
    graphs = []
    counts = {}
    for lv in levels:
        for key in lv:
            cg = with_norm(CanonicalGraph(_key_matrix(key)))
            graphs.append(cg)
            counts[cg.vertices] = counts.get(cg.vertices, 0) + 1
    return EnumerationResult(tuple(graphs), truncated, counts)


# ---------------------------------------------------------------------------
# atlas


@dataclass(frozen=True)
class AtlasEntry:
    norm_squared: float
    witness: CanonicalGraph
    cls: str
    multiplicity: int = 1  # number of enumerated graphs sharing this value
    label: str | None = None

    def to_json(self) -> dict:
        return {"key": self.witness.digest, "norm_squared": self.norm_squared, "class": self.cls,
                "witness": [list(r) for r in self.witness.mult], "label": self.label,
                "graphs": self.multiplicity}

    @classmethod
    def from_json(cls, obj: dict) -> "AtlasEntry":
        w = with_norm(CanonicalGraph(tuple(tuple(r) for r in obj["witness"])))
        return cls(obj["norm_squared"], w, obj["class"], obj.get("graphs", 1), obj.get("label"))


def _witness_order(cg: CanonicalGraph):
    return cg.vertices, cg.edges, cg.key


def classify(stream: Iterable[CanonicalGraph]) -> list[AtlasEntry]:
    """Deduplicate by norm within ``1e-9``; each value keeps its smallest witness."""
    items = sorted((with_norm(g) if math.isnan(g.norm_squared) else g for g in stream),
                   key=lambda g: g.norm_squared)
    groups: list[list[CanonicalGraph]] = []
    for g in items:
        if groups and g.norm_squared - groups[-1][0].norm_squared <= DEDUP_TOL:
            groups[-1].append(g)
        else:
            groups.append([g])
    out = []
    for grp in groups:
        w = min(grp, key=_witness_order)
        out.append(AtlasEntry(w.norm_squared, w, classify_norm(w), len(grp), dynkin_label(w)))
    return out


def default_atlas_path() -> Path:
    base = os.environ.get("SUBSPEC_ATLAS_DIR")
    root = Path(base) if base else Path.home() / ".cache" / "subspec"
    return root / "atlas.jsonl"


class Atlas:
    """Append-only JSON-lines store of atlas entries keyed by the witness hash."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else default_atlas_path()

    def load(self) -> list[AtlasEntry]:
        if not self.path.exists():
            return []
        out = []
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if line:
                    out.append(AtlasEntry.from_json(json.loads(line)))
        return sorted(out, key=lambda e: e.norm_squared)

    def keys(self) -> set[str]:
        return {e.witness.digest for e in self.load()}

    def extend(self, entries: Iterable[AtlasEntry]) -> int:
        """Append entries whose key is new; returns how many were written."""
        have = self.keys()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        n = 0
        with self.path.open("a") as fh:
            for e in entries:
                if e.witness.digest in have:
                    continue
                fh.write(json.dumps(e.to_json()) + "\n")
                have.add(e.witness.digest)
                n += 1
        return n


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class MembershipResult:
    found: bool
    alpha: float
    witness: CanonicalGraph | None
    bounds: dict
    caveat: str = ""

    def to_json(self) -> dict:
        out = {"found": self.found, "alpha": self.alpha, "bounds": self.bounds}
        if self.witness is not None:
            out["witness"] = [list(r) for r in self.witness.mult]
            out["norm_squared"] = self.witness.norm_squared
        else:
            out["result"] = "NotFoundWithinBounds"
            out["caveat"] = self.caveat
        return out


NOT_FOUND_CAVEAT = ("no graph within the scan bounds has this square norm; finite graphs are dense "
                    "in the set of norms, so this is not a proof of non-membership")


def membership_query(alpha: float, tol: float = 1e-9, max_vertices: int = 10,
                     max_multiplicity: int = 1, max_edges: int | None = None) -> MembershipResult:
    """Smallest witness (vertices, edges, key) with ``|norm^2 - alpha| <= tol``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    bounds = {"max_vertices": max_vertices, "max_multiplicity": max_multiplicity, "max_edges": max_edges}
    hits = [g for g in enumerate_graphs(max_vertices, max_multiplicity, max_edges)
            if abs(g.norm_squared - alpha) <= tol]
    if hits:
        return MembershipResult(True, alpha, min(hits, key=_witness_order), bounds)
    return MembershipResult(False, alpha, None, bounds, NOT_FOUND_CAVEAT)


def query_e2(alpha: float, tol: float = 1e-9, **bounds) -> MembershipResult:
    return membership_query(alpha, tol, **bounds)
