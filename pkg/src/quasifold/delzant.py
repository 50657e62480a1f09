"""Reduction data for a simple polytope: the level map, its regularity, and the induced moment map.

Conventions: the ambient space is ``C^d`` with moduli ``r_j = |z_j|^2`` and
phases ``theta_j`` in turns. The torus moment map is ``J = sum (r_j + lambda_j) e_j^*``
and the subtorus algebra is ``n = ker(e_j -> X_j)``; a point lies on the zero
level exactly when ``r + lambda`` is orthogonal to ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Sequence

import numpy as np

from .exactmath import FieldScalar, field_inverse, field_kernel, field_rank
from .polytope import PolytopeH, Vertex, check_simple
from .quasilattice import Quasilattice, build_quasilattice


class NotSimple(ValueError):
    def __init__(self, offending: Sequence[Vertex]):
        self.offending = tuple(offending)
        super().__init__(f"polytope is not simple at {len(self.offending)} vertex(es): "
                         f"{[v.active for v in self.offending]}")


class NotOnLevelSet(ValueError):
    pass


class OutsidePolytope(ValueError):
    pass


def _is_exact(x) -> bool:
    return isinstance(x, (FieldScalar, int, Rational)) and not isinstance(x, bool)


@dataclass(frozen=True)
class LevelPoint:
    """Point of ``C^d`` stored as moduli ``|z_j|^2`` and phases in ``[0, 1)``."""

    moduli: tuple
    phases: tuple

    def __post_init__(self):
        if len(self.moduli) != len(self.phases):
            raise ValueError("moduli and phases differ in length")
        if any(r < 0 for r in self.moduli):
            raise ValueError("moduli must be nonnegative")

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(r) for r in self.moduli)

    def coordinates(self) -> np.ndarray:
        """Complex coordinates ``sqrt(r_j) exp(2 pi i theta_j)``."""
        r = np.array([float(x) for x in self.moduli])
        th = np.array([float(x) for x in self.phases])
        return np.sqrt(r) * np.exp(2j * np.pi * th)


@dataclass(frozen=True)
class RegularityCertificate:
    passed: bool
    offending_face: tuple[int, ...] | None
    faces_checked: int

    def __bool__(self):
        return self.passed


@dataclass(frozen=True, eq=False)
class DelzantData:
    polytope: PolytopeH
    quasilattice: Quasilattice
    kernel_basis: np.ndarray
    offsets: tuple

    @property
    def d(self) -> int:
        return self.polytope.d

    @property
    def n(self) -> int:
        return self.polytope.n

    @property
    def dim_N(self) -> int:
        return self.kernel_basis.shape[0]

    @property
    def dim_X(self) -> int:
        return 2 * self.d

    @property
    def dim_M(self) -> int:
        return self.dim_X - 2 * self.dim_N

    @cached_property
    def solve_face(self) -> tuple[int, ...]:
        """Active set of the lexicographically first vertex."""
        return min(v.active for v in self.polytope.vertices)

    @cached_property
    def solve_inverse(self) -> np.ndarray:
        return field_inverse(self.polytope.normals[list(self.solve_face)])

    @cached_property
    def floats(self) -> "FloatView":
        P = self.polytope
        return FloatView(
            normals=P.normals_float(),
            offsets=P.offsets_float(),
            basis=np.array([[float(x) for x in row] for row in self.kernel_basis],
                           dtype=np.float64).reshape(self.dim_N, self.d),
            solve_idx=np.array(self.solve_face, dtype=np.int64),
            solve_inv=np.array([[float(x) for x in row] for row in self.solve_inverse],
                               dtype=np.float64),
            vertices=np.array([v.to_float() for v in P.vertices]),
        )


@dataclass(frozen=True, eq=False)
class FloatView:
    """float64 copies of the exact data, for the batch kernels."""

    normals: np.ndarray
    offsets: np.ndarray
    basis: np.ndarray
    solve_idx: np.ndarray
    solve_inv: np.ndarray
    vertices: np.ndarray


def build_construction(P: PolytopeH, require_simple: bool = True) -> DelzantData:
    """Kernel basis of ``e_j -> X_j`` (one row per free column) and the quasilattice.

    ``require_simple=False`` skips the simplicity check so that the regularity
    certificate can be inspected on non-simple input.
    """
    if require_simple:
        report = check_simple(P)
        if not report.is_simple:
            raise NotSimple(report.offending)
    G = P.normals
    # columns of G.T are the X_j, so its kernel is ker(e_j -> X_j)
    B = field_kernel(G.T)
    Q = build_quasilattice(G)
    return DelzantData(P, Q, B, P.offsets)


def psi(D: DelzantData, p: LevelPoint) -> np.ndarray:
    """``B (r + lambda)``: the subtorus moment map, zero on the reduction level."""
    if len(p.moduli) != D.d:
        raise ValueError(f"expected {D.d} moduli, got {len(p.moduli)}")
    if p.is_exact:
        v = np.array([FieldScalar._coerce(r) + lam for r, lam in zip(p.moduli, D.offsets)],
                     dtype=object)
        return D.kernel_basis.dot(v) if D.dim_N else np.empty(0, dtype=object)
    F = D.floats
    return F.basis @ (np.asarray(p.moduli, dtype=np.float64) + F.offsets)


def check_regular_value(D: DelzantData) -> RegularityCertificate:
    """Zero is regular iff at every vertex the inactive columns of ``B`` span ``R^(d-n)``.

    Faces are subsets of vertex active sets, so checking vertices covers them.
    This holds for every vertex exactly when the polytope is simple.
    """
    B = D.kernel_basis
    faces = sorted({v.active for v in D.polytope.vertices})
    for F in faces:
        inactive = [j for j in range(D.d) if j not in F]
        cols = B[:, inactive]
        if D.dim_N and (not inactive or field_rank(cols.T) < D.dim_N):
            return RegularityCertificate(False, F, len(faces))
    return RegularityCertificate(True, None, len(faces))


def moment_map(D: DelzantData, p: LevelPoint, tol: float = 1e-9) -> np.ndarray:
    """Solve ``<mu, X_j> = r_j + lambda_j`` on the designated vertex basis.

    The remaining ``d - n`` equations are a consistency check; failing it
    (exactly, or beyond ``tol`` in float mode) raises NotOnLevelSet.
    """
    if len(p.moduli) != D.d:
        raise ValueError(f"expected {D.d} moduli, got {len(p.moduli)}")
    S = D.solve_face
    if p.is_exact:
        target = [FieldScalar._coerce(r) + lam for r, lam in zip(p.moduli, D.offsets)]
        mu = D.solve_inverse.dot(np.array([target[j] for j in S], dtype=object))
        for j, h in enumerate(D.polytope.halfspaces):
            if sum((x * c for x, c in zip(h.normal, mu)), FieldScalar(0)) != target[j]:
                raise NotOnLevelSet(f"equation {j} fails exactly")
        return mu
    F = D.floats
    target = np.asarray(p.moduli, dtype=np.float64) + F.offsets
    mu = F.solve_inv @ target[F.solve_idx]
    resid = np.abs(F.normals @ mu - target).max()
    if resid > tol:
        raise NotOnLevelSet(f"residual {resid:.3g} exceeds {tol:.3g}")
    return mu


def fiber_point(D: DelzantData, mu: Sequence, eps: float = 0.0) -> LevelPoint:
    """Point over ``mu`` with ``r_j = <mu, X_j> - lambda_j`` and zero phases."""
    P = D.polytope
    if len(mu) != P.n:
        raise ValueError(f"point has length {len(mu)}, expected {P.n}")
    if all(_is_exact(c) for c in mu):
        r = tuple(h.slack([FieldScalar._coerce(c) for c in mu]) for h in P.halfspaces)
        if any(x < 0 for x in r):
            raise OutsidePolytope("point violates an inequality")
        return LevelPoint(r, (Fraction(0),) * P.d)
    F = D.floats
    r = F.normals @ np.asarray(mu, dtype=np.float64) - F.offsets
    if np.any(r < -eps):
        raise OutsidePolytope(f"point violates an inequality by {-r.min():.3g}")
    return LevelPoint(tuple(np.maximum(r, 0.0).tolist()), (0.0,) * P.d)


def _shift(theta, phi):
    if _is_exact(theta) and _is_exact(phi):
        t = FieldScalar._coerce(theta) + phi
        if t.is_rational():
            return t.a % 1
    return (float(theta) + float(phi)) % 1.0


def act_torus(p: LevelPoint, phi: Sequence) -> LevelPoint:
    """Rotate phases by ``phi`` (turns); moduli are untouched."""
    if len(phi) != len(p.phases):
        raise ValueError("phase shift has the wrong length")
    return LevelPoint(p.moduli, tuple(_shift(t, f) for t, f in zip(p.phases, phi)))
