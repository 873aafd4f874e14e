"""Concrete finite-dimensional multimatrix inclusions.

An ambient algebra ``M = (+)_i M_{n_i}`` is realized as block-diagonal
``D x D`` complex matrices (``D = sum n_i``) with trace
``Tr(x) = sum_i w_i tr(x_ii)``.  Elements are vectorized with the factor
``sqrt(w_i)`` so that the trace inner product ``<x, y> = Tr(y* x)`` becomes the
Euclidean one; subalgebras are orthonormal spanning sets in these coordinates
and trace-preserving expectations are orthogonal projections.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import linalg as sla

from .graph_core import BipartiteGraph, transpose

CLOSURE_TOL = 1e-10
RANK_TOL = 1e-9


class SubalgebraError(ValueError):
    """A spanning set is not a unital *-subalgebra of its ambient."""


class TraceError(ValueError):
    """Trace weights are not a faithful state."""


class RankDeficiencyError(ArithmeticError):
    """Gram-Schmidt pivot fell below the breakdown threshold."""


def _rank(mat: np.ndarray, tol: float = RANK_TOL) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int((s > tol * max(1.0, s[0])).sum())


def _orthonormal_columns(mat: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    if mat.size == 0:
        return mat.reshape(mat.shape[0], 0)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    r = int((s > tol * max(1.0, s[0] if s.size else 0)).sum())
    return u[:, :r]


def _to_fraction(w):
    if isinstance(w, (int, Fraction)):
        return Fraction(w)
    if isinstance(w, str):
        return Fraction(w)
    return float(w)


@dataclass(frozen=True)
class MultiMatrixAlgebra:
    """``(+)_i M_{n_i}(C)`` with the trace giving weight ``w_i`` to a minimal projection of block ``i``."""

    block_sizes: tuple[int, ...]
    trace_weights: tuple

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        weights = tuple(_to_fraction(w) for w in self.trace_weights)
        if not sizes or any(n <= 0 for n in sizes):
            raise ValueError("block sizes must be positive")
        if len(weights) != len(sizes):
            raise ValueError("one trace weight per block")
        if any(not w > 0 for w in weights):
            raise TraceError("trace weights must be positive (faithful trace)")
        total = sum(n * w for n, w in zip(sizes, weights))
        if abs(float(total) - 1) > 1e-12:
            raise TraceError(f"sum n_i w_i = {total}, expected 1")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "trace_weights", weights)

    @classmethod
    def full(cls, n: int) -> "MultiMatrixAlgebra":
        """``M_n`` with the normalized trace."""
        return cls((n,), (Fraction(1, n),))

    @property
    def size(self) -> int:
        return sum(self.block_sizes)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_sizes)

    @property
    def offsets(self) -> list[int]:
        return list(itertools.accumulate((0,) + self.block_sizes[:-1]))

    def identity(self) -> np.ndarray:
        return np.eye(self.size, dtype=complex)

    def block_projection(self, i: int) -> np.ndarray:
        p = np.zeros((self.size, self.size), complex)
        o = self.offsets[i]
        n = self.block_sizes[i]
        p[o:o + n, o:o + n] = np.eye(n)
        return p

    def _scales(self) -> np.ndarray:
        return np.concatenate([np.full(n * n, math.sqrt(float(w)))
                               for n, w in zip(self.block_sizes, self.trace_weights)])

    def vec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        parts = []
        for o, n in zip(self.offsets, self.block_sizes):
            parts.append(x[o:o + n, o:o + n].reshape(-1))
        return np.concatenate(parts) * self._scales()

    def unvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex) / self._scales()
        x = np.zeros((self.size, self.size), complex)
        k = 0
        for o, n in zip(self.offsets, self.block_sizes):
            x[o:o + n, o:o + n] = v[k:k + n * n].reshape(n, n)
            k += n * n
        return x

    def is_element(self, x: np.ndarray, tol: float = CLOSURE_TOL) -> bool:
        x = np.asarray(x, complex)
        if x.shape != (self.size, self.size):
            return False
        return bool(np.abs(x - self.unvec(self.vec(x))).max(initial=0) <= tol)

    def trace(self, x: np.ndarray) -> complex:
        return complex(sum(float(w) * np.trace(x[o:o + n, o:o + n])
                           for o, n, w in zip(self.offsets, self.block_sizes, self.trace_weights)))

    def inner(self, x, y) -> complex:
        return complex(np.vdot(self.vec(y), self.vec(x)))

    def matrix_units(self) -> list[np.ndarray]:
        out = []
        for o, n in zip(self.offsets, self.block_sizes):
            for a in range(n):
                for b in range(n):
                    e = np.zeros((self.size, self.size), complex)
                    e[o + a, o + b] = 1
                    out.append(e)
        return out

    def whole(self) -> "EmbeddedSubalgebra":
        return EmbeddedSubalgebra.span(self, self.matrix_units())


@dataclass(frozen=True, eq=False)
class EmbeddedSubalgebra:
    """Unital *-subalgebra given by an orthonormal basis (columns of ``V`` in vec coordinates)."""

    ambient: MultiMatrixAlgebra
    V: np.ndarray
    name: str = ""

    @classmethod
    def span(cls, ambient: MultiMatrixAlgebra, elements: Sequence[np.ndarray], name: str = "",
             check: bool = True) -> "EmbeddedSubalgebra":
        for x in elements:
            if not ambient.is_element(x):
                raise SubalgebraError("element is not block diagonal for the ambient blocks")
        mat = np.column_stack([ambient.vec(x) for x in elements]) if elements else \
            np.zeros((ambient.dim, 0), complex)
        sub = cls(ambient, _orthonormal_columns(mat), name)
        if check:
            sub.check()
        return sub

    @classmethod
    def generated(cls, ambient: MultiMatrixAlgebra, generators: Sequence[np.ndarray],
                  name: str = "", max_rounds: int = 64) -> "EmbeddedSubalgebra":
        """Smallest unital *-subalgebra containing ``generators``."""
        elems = [ambient.identity()] + [np.asarray(g, complex) for g in generators]
        elems += [g.conj().T for g in elems]
        V = _orthonormal_columns(np.column_stack([ambient.vec(x) for x in elems]))
        for _ in range(max_rounds):
            basis = [ambient.unvec(V[:, k]) for k in range(V.shape[1])]
            prods = [a @ b for a in basis for b in basis]
            W = _orthonormal_columns(np.column_stack([V] + [ambient.vec(p)[:, None] for p in prods]))
            if W.shape[1] == V.shape[1]:
                break
            V = W
        else:
            raise SubalgebraError("generated algebra did not stabilize")
        sub = cls(ambient, V, name)
        sub.check()
        return sub

    @property
    def dim(self) -> int:
        return self.V.shape[1]

    @property
    def basis(self) -> list[np.ndarray]:
        return [self.ambient.unvec(self.V[:, k]) for k in range(self.dim)]

    @property
    def projector(self) -> np.ndarray:
        return self.V @ self.V.conj().T

    def project(self, x: np.ndarray) -> np.ndarray:
        v = self.ambient.vec(x)
        return self.ambient.unvec(self.V @ (self.V.conj().T @ v))

    def residual(self, x: np.ndarray) -> float:
        v = self.ambient.vec(x)
        return float(np.linalg.norm(v - self.V @ (self.V.conj().T @ v)))

    def contains(self, x: np.ndarray, tol: float = CLOSURE_TOL) -> bool:
        return self.residual(x) <= tol * max(1.0, float(np.linalg.norm(self.ambient.vec(x))))

    def check(self, tol: float = CLOSURE_TOL) -> None:
        if not self.contains(self.ambient.identity(), tol):
            raise SubalgebraError(f"{self.name or 'subalgebra'} does not contain the identity")
        basis = self.basis
        for b in basis:
            if not self.contains(b.conj().T, tol):
                raise SubalgebraError(f"{self.name or 'subalgebra'} is not closed under adjoint")
        for a in basis:
            for b in basis:
                if not self.contains(a @ b, tol):
                    raise SubalgebraError(f"{self.name or 'subalgebra'} is not closed under products")

    def is_subalgebra_of(self, other: "EmbeddedSubalgebra", tol: float = CLOSURE_TOL) -> bool:
        return all(other.contains(b, tol) for b in self.basis)

    # -- central structure ------------------------------------------------

    def center(self) -> list[np.ndarray]:
        basis = self.basis
        rows = []
        for b in basis:
            rows.append(np.column_stack([(a @ b - b @ a).reshape(-1) for a in basis]))
        C = np.vstack(rows)
        _, sv, Vh = np.linalg.svd(C)
        sv = np.concatenate([sv, np.zeros(Vh.shape[0] - sv.size)])
        ns = Vh[sv <= 1e-9].conj().T  # basis elements have unit norm, so an absolute cut is safe
        return [sum(c * a for c, a in zip(ns[:, k], basis)) for k in range(ns.shape[1])]

    def central_projections(self, seed: int = 20240611) -> list[np.ndarray]:
        """Minimal central projections, ordered by their first nonzero diagonal position."""
        Z = self.center()
        rng = np.random.default_rng(seed)
        h = sum(rng.normal() * (z + z.conj().T) / 2 + rng.normal() * (z - z.conj().T) / 2j for z in Z)
        w, U = np.linalg.eigh(h)
        groups, cur = [], [0]
        for k in range(1, len(w)):
            if abs(w[k] - w[cur[-1]]) <= 1e-7 * max(1.0, abs(w).max()):
                cur.append(k)
            else:
                groups.append(cur)
                cur = [k]
        groups.append(cur)
        projs = [U[:, g] @ U[:, g].conj().T for g in groups]
        projs = [p for p in projs if np.trace(p).real > 0.5]

        def first_diag(p):
            d = np.abs(np.diag(p))
            return int(np.argmax(d > 0.5 / p.shape[0] ** 2))

        return sorted(projs, key=first_diag)

    def summand_dims(self, projections: Sequence[np.ndarray]) -> list[int]:
        """Matrix size ``n_z`` of each summand ``A z``."""
        out = []
        for z in projections:
            r = _rank(np.column_stack([self.ambient.vec(b @ z) for b in self.basis]))
            n = math.isqrt(r)
            if n * n != r:
                raise SubalgebraError(f"summand of dimension {r} is not a full matrix algebra")
            out.append(n)
        return out

    def minimal_traces(self, projections: Sequence[np.ndarray] | None = None) -> list[float]:
        """Trace of a minimal projection in each summand (ambient trace)."""
        projections = self.central_projections() if projections is None else projections
        dims = self.summand_dims(projections)
        return [self.ambient.trace(z).real / n for z, n in zip(projections, dims)]


def _proj_trace_rank(p: np.ndarray) -> int:
    r = np.trace(p).real
    k = int(round(r))
    if abs(r - k) > 1e-6:
        raise SubalgebraError(f"element with trace {r} is not a projection")
    return k


def inclusion_matrix(sub: EmbeddedSubalgebra, sup: EmbeddedSubalgebra,
                     sub_projections: Sequence[np.ndarray] | None = None,
                     sup_projections: Sequence[np.ndarray] | None = None,
                     names: tuple[str, str] = ("q", "p")) -> BipartiteGraph:
    """Multiplicities ``b_ij`` of summand ``i`` of ``sub`` in summand ``j`` of ``sup``.

    With ``n_i`` the size of the ``sub`` summand and ``m_j`` the ambient
    multiplicity of a minimal projection of the ``sup`` summand,
    ``rank(q_i p_j) = n_i * b_ij * m_j``.
    """
    if not sub.is_subalgebra_of(sup):
        raise SubalgebraError("not an inclusion: the smaller algebra is not contained in the larger")
    qs = sub.central_projections() if sub_projections is None else list(sub_projections)
    ps = sup.central_projections() if sup_projections is None else list(sup_projections)
    nq = sub.summand_dims(qs)
    npp = sup.summand_dims(ps)
    m_sup = [_proj_trace_rank(p) // n for p, n in zip(ps, npp)]
    mult = []
    for q, ni in zip(qs, nq):
        row = []
        for p, nj, mj in zip(ps, npp, m_sup):
            r = _proj_trace_rank(q @ p)
            if r % (ni * mj):
                raise SubalgebraError("non-integral multiplicity")
            row.append(r // (ni * mj))
        mult.append(tuple(row))
    return BipartiteGraph(tuple(f"{names[0]}{k}" for k in range(len(qs))),
                          tuple(f"{names[1]}{k}" for k in range(len(ps))), tuple(mult))


# ---------------------------------------------------------------------------
# expectations


@dataclass(frozen=True, eq=False)
class ExpectationMap:
    """Trace-preserving conditional expectation of the ambient onto ``target``."""

    target: EmbeddedSubalgebra

    @property
    def ambient(self) -> MultiMatrixAlgebra:
        return self.target.ambient

    @property
    def matrix(self) -> np.ndarray:
        return self.target.projector

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.target.project(x)


def expectation(ambient: MultiMatrixAlgebra, target: EmbeddedSubalgebra,
                tol: float = CLOSURE_TOL) -> ExpectationMap:
    """Orthogonal projection onto ``target`` for the trace inner product.

    Checks unitality and ``E(b1 x b2) = b1 E(x) b2`` on basis triples.
    """
    if target.ambient != ambient:
        raise SubalgebraError("target lives in a different ambient")
    target.check(tol)
    E = ExpectationMap(target)
    one = ambient.identity()
    if np.abs(E(one) - one).max() > tol:
        raise SubalgebraError("expectation is not unital")
    bs = target.basis
    xs = ambient.matrix_units()
    for b1, b2 in itertools.product(bs[:4], bs[:4]):
        for x in xs[:: max(1, len(xs) // 4)]:
            if np.abs(E(b1 @ x @ b2) - b1 @ E(x) @ b2).max() > 1e3 * tol:
                raise SubalgebraError("expectation is not bimodular")
    return E


@dataclass(frozen=True, eq=False)
class CommutingSquareReport:
    is_csq: bool
    intersection: EmbeddedSubalgebra
    residual_commute: float
    residual_intersection: float


def intersection(P: EmbeddedSubalgebra, N: EmbeddedSubalgebra, name: str = "Q") -> EmbeddedSubalgebra:
    ns = sla.null_space(np.hstack([P.V, -N.V]), rcond=1e-9)
    vecs = P.V @ ns[: P.dim, :]
    V = _orthonormal_columns(vecs)
    sub = EmbeddedSubalgebra(P.ambient, V, name)
    sub.check(1e-8)
    return sub


def commuting_square_check(M: MultiMatrixAlgebra, P: EmbeddedSubalgebra, N: EmbeddedSubalgebra,
                           tol: float = 1e-10) -> CommutingSquareReport:
    """``E_P E_N = E_N E_P = E_{P cap N}`` as linear maps on ``M``."""
    Q = intersection(P, N)
    EP, EN, EQ = P.projector, N.projector, Q.projector
    r1 = float(np.abs(EP @ EN - EN @ EP).max())
    r2 = float(max(np.abs(EP @ EN - EQ).max(), np.abs(EN @ EP - EQ).max()))
    return CommutingSquareReport(r1 <= tol and r2 <= tol, Q, r1, r2)


def nondegeneracy_check(M: MultiMatrixAlgebra, P: EmbeddedSubalgebra, N: EmbeddedSubalgebra) -> bool:
    """``span(P N) = M``."""
    prods = [M.vec(p @ n) for p in P.basis for n in N.basis]
    return _rank(np.column_stack(prods)) == M.dim


# ---------------------------------------------------------------------------
# basic construction


def left_multiplication(M: MultiMatrixAlgebra, x: np.ndarray) -> np.ndarray:
    """Matrix of ``y -> x y`` on ``L^2(M)`` in orthonormal vec coordinates."""
    d = M.dim
    out = np.zeros((d, d), complex)
    for k in range(d):
        e = np.zeros(d, complex)
        e[k] = 1
        out[:, k] = M.vec(x @ M.unvec(e))
    return out


@dataclass(frozen=True, eq=False)
class BasicConstructionScene:
    M: MultiMatrixAlgebra
    B: EmbeddedSubalgebra
    L2: MultiMatrixAlgebra          # B(L^2 M) as a single full matrix block
    LM: EmbeddedSubalgebra          # M acting by left multiplication
    e_B: np.ndarray
    M1: EmbeddedSubalgebra
    E1: "WeightedExpectation"
    residual_i: float
    commutant_ok: bool
    faithful_ok: bool
    support_ok: bool
    lambda_B_M: BipartiteGraph
    lambda_M_M1: BipartiteGraph
    transpose_ok: bool

    @property
    def dim_M1(self) -> int:
        return self.M1.dim

    def left(self, x: np.ndarray) -> np.ndarray:
        return left_multiplication(self.M, x)


@dataclass(frozen=True, eq=False)
class WeightedExpectation:
    """Expectation of a subalgebra ``A`` onto ``C`` preserving ``Tr(. D)`` with ``D`` central in ``A``."""

    target_basis: tuple
    density: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        bs = self.target_basis
        D = self.density
        G = np.array([[np.trace(bj.conj().T @ bi @ D) for bi in bs] for bj in bs])
        rhs = np.array([np.trace(bj.conj().T @ x @ D) for bj in bs])
        c = np.linalg.solve(G, rhs)
        return sum(ci * bi for ci, bi in zip(c, bs))


def basic_construction(M: MultiMatrixAlgebra, B: EmbeddedSubalgebra,
                       tol: float = CLOSURE_TOL) -> BasicConstructionScene:
    """Jones basic construction ``M subset <M, e_B>`` on ``L^2(M)``.

    Verifies ``e_B x e_B = E_B(x) e_B``, ``{e_B}' cap M = B`` with ``b -> b e_B``
    injective, that the ranges of ``x e_B`` (``x`` in ``M``) fill ``L^2(M)``, and that
    the inclusion graph of ``M`` in ``M_1`` is the transpose of that of ``B`` in ``M``.
    """
    if B.ambient != M:
        raise SubalgebraError("B must be a subalgebra of M")
    d = M.dim
    L2 = MultiMatrixAlgebra.full(d)
    e = B.projector
    units = M.matrix_units()
    lefts = [left_multiplication(M, x) for x in units]
    LM = EmbeddedSubalgebra.span(L2, lefts, "L(M)")
    M1 = EmbeddedSubalgebra.generated(L2, lefts + [e], "M1")

    EB = ExpectationMap(B)
    res_i = max(float(np.abs(e @ Lx @ e - left_multiplication(M, EB(x)) @ e).max())
                for x, Lx in zip(units, lefts))

    comm = np.column_stack([(Lx @ e - e @ Lx).reshape(-1) for Lx in lefts])
    ns = sla.null_space(comm, rcond=1e-10)
    commutant_dim = ns.shape[1]
    commutant_ok = commutant_dim == B.dim and all(
        np.abs(left_multiplication(M, b) @ e - e @ left_multiplication(M, b)).max() <= 1e3 * tol
        for b in B.basis)
    faithful_ok = _rank(np.column_stack([(left_multiplication(M, b) @ e).reshape(-1)
                                         for b in B.basis])) == B.dim
    support_ok = _rank(np.hstack([Lx @ e for Lx in lefts])) == d

    qs = B.central_projections()
    lam_BM = inclusion_matrix(B, M.whole(), qs, [M.block_projection(j) for j in range(len(M.block_sizes))],
                              names=("b", "m"))
    # summands of M1 are matched with those of B through z' e = q e
    zs = EmbeddedSubalgebra.central_projections(M1)
    matched = []
    for q in qs:
        qe = left_multiplication(M, q) @ e
        k = int(np.argmin([np.abs(z @ e - qe).max() for z in zs]))
        if np.abs(zs[k] @ e - qe).max() > 1e-8:
            raise SubalgebraError("could not match a central projection of M1 with one of B")
        matched.append(zs[k])
    if len(matched) != len(zs):
        raise SubalgebraError("M1 and B have different numbers of summands")
    p_left = [left_multiplication(M, M.block_projection(j)) for j in range(len(M.block_sizes))]
    lam_MM1 = inclusion_matrix(LM, M1, p_left, matched, names=("m", "b"))
    transpose_ok = lam_MM1.mult == transpose(lam_BM).mult

    # trace on M1 with Tr1(f e) = Tr(f) for f minimal in B, then expectation onto L(M)
    nB = B.summand_dims(qs)
    nM1 = M1.summand_dims(matched)
    dens = np.zeros((d, d), complex)
    for q, z, nb, nz in zip(qs, matched, nB, nM1):
        f_trace = M.trace(q).real / nb
        amb_rank = _proj_trace_rank(z) / nz
        dens += (f_trace / amb_rank) * z
    E1 = WeightedExpectation(tuple(LM.basis), dens)

    return BasicConstructionScene(M, B, L2, LM, e, M1, E1, res_i, commutant_ok, faithful_ok,
                                  support_ok, lam_BM, lam_MM1, transpose_ok)


# ---------------------------------------------------------------------------
# orthonormal bases and indices


def _pinv_sqrt(a: np.ndarray, tol: float) -> np.ndarray:
    w, U = np.linalg.eigh((a + a.conj().T) / 2)
    inv = np.array([1 / math.sqrt(x) if x > tol else 0.0 for x in w])
    return (U * inv) @ U.conj().T


def orthonormal_basis(E: ExpectationMap, seed: int | None = None,
                      breakdown: float = 1e-10) -> list[np.ndarray]:
    """Pimsner-Popa basis ``{m_j}`` of the ambient over ``E``'s target.

    Gram-Schmidt for the ``B``-valued inner product ``E(x* y)``: each candidate
    is orthogonalized against the basis so far and normalized by the pseudo
    inverse square root of ``E(x'* x')``, so ``E(m_j* m_j)`` is a projection.
    The candidates are the matrix units; ``seed`` randomizes their order and
    mixes them by a random unitary.
    """
    M = E.ambient
    cands = M.matrix_units()
    if seed is not None:
        rng = np.random.default_rng(seed)
        d = M.dim
        Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        Qm, _ = np.linalg.qr(Z)
        vecs = np.column_stack([M.vec(c) for c in cands]) @ Qm
        cands = [M.unvec(vecs[:, k]) for k in rng.permutation(d)]
    basis: list[np.ndarray] = []
    for x in cands:
        xp = x - sum((m @ E(m.conj().T @ x) for m in basis), np.zeros_like(x))
        a = E(xp.conj().T @ xp)
        if np.abs(a).max() < breakdown:
            continue
        basis.append(xp @ _pinv_sqrt(a, breakdown))
    total = sum(m @ m.conj().T for m in basis)
    if not basis or np.linalg.matrix_rank(total) < M.size:
        raise RankDeficiencyError("orthonormal basis does not span the ambient")
    return basis


def ob_defects(E: ExpectationMap, basis: Sequence[np.ndarray]) -> float:
    """Max deviation of ``E(m_i* m_j)`` from ``delta_ij`` times a projection."""
    worst = 0.0
    for i, mi in enumerate(basis):
        for j, mj in enumerate(basis):
            g = E(mi.conj().T @ mj)
            if i == j:
                worst = max(worst, float(np.abs(g @ g - g).max()), float(np.abs(g - g.conj().T).max()))
            else:
                worst = max(worst, float(np.abs(g).max()))
    return worst


def index_via_ob(basis: Sequence[np.ndarray]) -> float:
    """Operator norm of ``sum_j m_j m_j*``."""
    Z = sum(m @ m.conj().T for m in basis)
    return float(np.linalg.eigvalsh((Z + Z.conj().T) / 2)[-1])


@dataclass(frozen=True)
class IndexReport:
    ind_ob: float
    lambda_lower: float
    lambda_upper: float
    ob_size: int
    regime: str  # "equality" when the multiplicity condition holds, else "inequality"
    samples: int = 0

    @property
    def lambda_E(self) -> float:
        return self.lambda_upper


def _rank_one_constants(E: ExpectationMap, xis: np.ndarray, offset: int) -> np.ndarray:
    """``sup{c : E(p) >= c p}`` for ``p = xi xi*`` (rows of ``xis`` live in one block)."""
    M = E.ambient
    D = M.size
    out = np.empty(len(xis))
    for k, xi in enumerate(xis):
        full = np.zeros(D, complex)
        full[offset:offset + len(xi)] = xi
        A = E(np.outer(full, full.conj()))
        Ap = np.linalg.pinv((A + A.conj().T) / 2, rcond=1e-12, hermitian=True)
        inrange = np.linalg.norm(A @ Ap @ full - full) <= 1e-9
        q = float(np.vdot(full, Ap @ full).real)
        out[k] = 1.0 / q if inrange and q > 0 else 0.0
    return out


def probabilistic_index(E: ExpectationMap, method: str = "bruteforce_rank1", samples: int = 10_000,
                        seed: int = 0, refine: int = 5, basis: Sequence[np.ndarray] | None = None
                        ) -> IndexReport:
    """Bracket on ``lambda(E) = sup{c >= 0 : E(x) >= c x for x >= 0}``.

    The upper end is the smallest constant found over sampled rank-one
    projections (plus a local refinement), padded by ``1e-12`` relative for
    rounding; it brackets but does not certify.  The lower end
    ``1 / ||sum m_j m_j*||`` is a proven bound.
    """
    M = E.ambient
    rng = np.random.default_rng(seed)
    basis = orthonormal_basis(E) if basis is None else basis
    ind = index_via_ob(basis)
    best = math.inf
    best_xi = None
    n_total = 0
    for o, n in zip(M.offsets, M.block_sizes):
        if method == "grid":
            g = max(2, int(round(samples ** (1 / max(1, 2 * n - 1)))))
            xis = _grid_sphere(n, g)
        elif method == "bruteforce_rank1":
            Z = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
            xis = Z / np.linalg.norm(Z, axis=1, keepdims=True)
        else:
            raise ValueError(f"unknown method {method!r}")
        cs = _rank_one_constants(E, xis, o)
        n_total += len(xis)
        k = int(np.argmin(cs))
        if cs[k] < best:
            best, best_xi = float(cs[k]), (xis[k], o)
    if best_xi is not None and refine:
        from scipy.optimize import minimize

        xi0, o = best_xi
        n = len(xi0)

        def f(p):
            z = p[:n] + 1j * p[n:]
            nz = np.linalg.norm(z)
            if nz == 0:
                return math.inf
            return _rank_one_constants(E, (z / nz)[None, :], o)[0]

        x0 = np.concatenate([xi0.real, xi0.imag])
        for _ in range(refine):
            r = minimize(f, x0 + 1e-3 * rng.normal(size=x0.shape), method="Nelder-Mead",
                         options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
            if r.fun < best:
                best = float(r.fun)
    regime = _regime(E)
    return IndexReport(ind, 1.0 / ind, best * (1 + 1e-12), len(basis), regime, n_total)


def _grid_sphere(n: int, g: int) -> np.ndarray:
    """Unit vectors from a product grid on real amplitudes and phases."""
    if n == 1:
        return np.ones((1, 1), complex)
    pts = []
    amps = np.linspace(0, 1, g)
    phases = np.linspace(0, 2 * np.pi, g, endpoint=False)
    for a in itertools.product(amps, repeat=n - 1):
        for ph in itertools.product(phases, repeat=n - 1):
            v = np.array([1.0] + [x * np.exp(1j * p) for x, p in zip(a, ph)], complex)
            pts.append(v / np.linalg.norm(v))
    return np.array(pts)


def _regime(E: ExpectationMap) -> str:
    B = E.target
    M = E.ambient
    qs = B.central_projections()
    g = inclusion_matrix(B, M.whole(), qs, [M.block_projection(j) for j in range(len(M.block_sizes))])
    sizes = B.summand_dims(qs)
    ok = all(b <= n for row, n in zip(g.mult, sizes) for b in row)
    return "equality" if ok else "inequality"
