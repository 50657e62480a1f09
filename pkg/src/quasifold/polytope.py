"""Exact H-representation ``{mu : <mu, X_j> >= lambda_j}`` and its vertex data."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from .exactmath import (
    FieldScalar,
    as_field_matrix,
    discriminant_of,
    field_kernel,
    field_rank,
    field_solve,
)


class DegeneratePolytope(ValueError):
    """The halfspaces do not cut out a bounded full-dimensional polytope."""


class EmptyPolytope(DegeneratePolytope):
    pass


class Unbounded(DegeneratePolytope):
    pass


class LowerDimensional(DegeneratePolytope):
    pass


@dataclass(frozen=True)
class Halfspace:
    normal: tuple[FieldScalar, ...]
    offset: FieldScalar

    def slack(self, mu: Sequence) -> FieldScalar:
        """``<mu, X> - lambda``; nonnegative exactly on the halfspace."""
        return sum((x * c for x, c in zip(self.normal, mu)), FieldScalar(0)) - self.offset


@dataclass(frozen=True)
class Vertex:
    coords: tuple[FieldScalar, ...]
    active: tuple[int, ...]

    def to_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords])


@dataclass(frozen=True)
class SimplicityReport:
    is_simple: bool
    offending: tuple[Vertex, ...] = ()

    def __bool__(self):
        return self.is_simple


def _dot(u, v) -> FieldScalar:
    return sum((a * b for a, b in zip(u, v)), FieldScalar(0))


class PolytopeH:
    """Polytope given by ``d`` halfspaces in ``n`` dimensions.

    Normals are taken verbatim; no rescaling to primitive vectors happens, since
    the quotient construction depends on the chosen normals.
    """

    def __init__(self, normals, offsets):
        normals = as_field_matrix(normals)
        offsets = [FieldScalar._coerce(x) for x in offsets]
        d, n = normals.shape
        if len(offsets) != d:
            raise ValueError(f"{d} normals but {len(offsets)} offsets")
        for j in range(d):
            if not any(normals[j]):
                raise ValueError(f"normal {j} is zero")
        self.m = discriminant_of(list(normals.flat) + offsets)
        self.n = n
        self.d = d
        self.halfspaces = tuple(
            Halfspace(tuple(normals[j]), offsets[j]) for j in range(d)
        )

    @property
    def normals(self) -> np.ndarray:
        """``d x n`` object matrix whose rows are the facet normals."""
        return as_field_matrix([h.normal for h in self.halfspaces])

    @property
    def offsets(self) -> tuple[FieldScalar, ...]:
        return tuple(h.offset for h in self.halfspaces)

    def normals_float(self) -> np.ndarray:
        return np.array([[float(x) for x in h.normal] for h in self.halfspaces], dtype=np.float64)

    def offsets_float(self) -> np.ndarray:
        return np.array([float(h.offset) for h in self.halfspaces], dtype=np.float64)

    def active_set(self, mu: Sequence) -> tuple[int, ...]:
        return tuple(j for j, h in enumerate(self.halfspaces) if h.slack(mu) == 0)

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(enumerate_vertices(self))

    def __repr__(self):
        return f"PolytopeH(n={self.n}, d={self.d}, m={self.m})"


def _check_bounded(P: PolytopeH) -> None:
    """Raise Unbounded unless the recession cone ``{y : <y, X_j> >= 0}`` is zero."""
    N = P.normals
    # a nonzero pointed cone has an extreme ray cut out by n-1 independent facets
    for S in combinations(range(P.d), P.n - 1):
        if S:
            sub = N[list(S)]
            if field_rank(sub) < P.n - 1:
                continue
            ray = field_kernel(sub)
        else:
            ray = as_field_matrix([[1]])
        for y in (ray[0], -ray[0]):
            if all(_dot(h.normal, y) >= 0 for h in P.halfspaces):
                raise Unbounded(f"recession direction {[str(c) for c in y]}")


def enumerate_vertices(P: PolytopeH) -> list[Vertex]:
    """All vertices of ``P`` by brute force over ``n``-subsets of facets.

    Output is sorted lexicographically by active set.
    """
    N = P.normals
    if P.d < P.n + 1:
        raise Unbounded(f"{P.d} halfspaces cannot bound a polytope in dimension {P.n}")
    if field_rank(N) < P.n:
        raise Unbounded("facet normals do not span the ambient space")
    found: dict[tuple, Vertex] = {}
    for S in combinations(range(P.d), P.n):
        A = N[list(S)]
        if field_rank(A) < P.n:
            continue
        mu = tuple(field_solve(A, [P.halfspaces[j].offset for j in S]))
        if mu in found:
            continue
        if all(h.slack(mu) >= 0 for h in P.halfspaces):
            found[mu] = Vertex(mu, P.active_set(mu))
    if not found:
        raise EmptyPolytope("no vertex satisfies all inequalities")
    _check_bounded(P)
    verts = sorted(found.values(), key=lambda v: v.active)
    base = verts[0].coords
    diffs = [[c - b for c, b in zip(v.coords, base)] for v in verts[1:]]
    if len(verts) <= P.n or field_rank(diffs) < P.n:
        raise LowerDimensional("vertices span a proper affine subspace")
    return verts


def check_simple(P: PolytopeH) -> SimplicityReport:
    """Simple iff every vertex lies on exactly ``n`` facets with independent normals."""
    N = P.normals
    bad = tuple(
        v for v in P.vertices
        if len(v.active) != P.n or field_rank(N[list(v.active)]) != P.n
    )
    return SimplicityReport(not bad, bad)


def contains(P: PolytopeH, mu: Sequence, mode: str = "exact", eps: float = 0.0) -> bool:
    if len(mu) != P.n:
        raise ValueError(f"point has length {len(mu)}, expected {P.n}")
    if mode == "exact":
        mu = [FieldScalar._coerce(c) for c in mu]
        return all(h.slack(mu) >= 0 for h in P.halfspaces)
    if mode == "tolerance":
        x = np.asarray([float(c) for c in mu])
        return bool(np.all(P.normals_float() @ x - P.offsets_float() >= -eps))
    raise ValueError(f"unknown mode {mode!r}")


def bounding_box(P: PolytopeH) -> np.ndarray:
    """``n x 2`` array of per-coordinate ``[min, max]`` over the vertices."""
    V = np.array([v.to_float() for v in P.vertices])
    return np.stack([V.min(axis=0), V.max(axis=0)], axis=1)
