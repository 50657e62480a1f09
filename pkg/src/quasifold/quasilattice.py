"""Quasilattices ``Q = Z X_1 + ... + Z X_d`` and the discrete groups attached to faces."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .exactmath import (
    as_field_matrix,
    as_int_matrix,
    field_kernel,
    field_rank,
    hermite_normal_form,
    int_solve,
    rational_kernel,
    saturate_lattice,
    smith_normal_form,
)
from .polytope import PolytopeH


class GeneratorsDoNotSpan(ValueError):
    pass


class DependentFaceNormals(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Quasilattice:
    """Generators ``X_j`` (rows of ``generators``) and their integer relations.

    ``relations`` is an HNF basis of ``K = {k in Z^d : sum k_j X_j = 0}``;
    ``q_rank = d - rank K`` is the rank of ``Q`` as an abelian group.
    """

    generators: np.ndarray
    relations: np.ndarray

    @property
    def d(self) -> int:
        return self.generators.shape[0]

    @property
    def n(self) -> int:
        return self.generators.shape[1]

    @property
    def q_rank(self) -> int:
        return self.d - self.relations.shape[0]


@dataclass(frozen=True, eq=False)
class QuasitorusData:
    """``D = R^n / Q``; only the dimension and the quasilattice are materialized."""

    dimension: int
    quasilattice: Quasilattice


@dataclass(frozen=True)
class IsotropyGroup:
    """``Z^free_rank x Z/f_1 x ... x Z/f_k`` attached to a face (facet index set)."""

    face: tuple[int, ...]
    invariant_factors: tuple[int, ...] = ()
    free_rank: int = 0

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.free_rank == 0

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        if not self.is_finite:
            return None
        return int(np.prod(self.invariant_factors, dtype=object)) if self.invariant_factors else 1

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{f}" for f in self.invariant_factors]
        return " x ".join(parts) if parts else "1"


class Classification(str, Enum):
    MANIFOLD = "Manifold"
    ORBIFOLD = "Orbifold"
    QUASIFOLD = "Quasifold"


@dataclass(frozen=True)
class ClassificationResult:
    kind: Classification
    groups: tuple[IsotropyGroup, ...]

    @property
    def nontrivial(self) -> tuple[IsotropyGroup, ...]:
        return tuple(g for g in self.groups if not g.is_trivial)


def build_quasilattice(generators) -> Quasilattice:
    G = as_field_matrix(generators)
    d, n = G.shape
    if d < n or field_rank(G) < n:
        raise GeneratorsDoNotSpan(f"{d} generators of rank {field_rank(G)} in dimension {n}")
    K = saturate_lattice(rational_kernel(G.T), dim=d)
    return Quasilattice(G, K)


def quasitorus(Q: Quasilattice) -> QuasitorusData:
    return QuasitorusData(Q.n, Q)


def is_lattice(Q: Quasilattice) -> bool:
    return Q.q_rank == Q.n


def face_lattice(Q: Quasilattice, face: Sequence[int]) -> np.ndarray:
    """HNF basis of ``S_F = {k in Z^d : sum k_j X_j in span{X_i : i in F}}``."""
    G = Q.generators
    # annihilator of span X_F, then <w, sum k_j X_j> = 0 for each w
    W = field_kernel(G[list(face)]) if face else _identity_field(Q.n)
    if W.shape[0] == 0:
        return hermite_normal_form(_int_identity(Q.d))
    constraints = W.dot(G.T)
    return saturate_lattice(rational_kernel(constraints), dim=Q.d)


def _identity_field(n: int) -> np.ndarray:
    return as_field_matrix([[int(i == j) for j in range(n)] for i in range(n)])


def _int_identity(n: int) -> np.ndarray:
    return as_int_matrix([[int(i == j) for j in range(n)] for i in range(n)])


def isotropy_group(Q: Quasilattice, face: Iterable[int]) -> IsotropyGroup:
    """``Gamma_F = S_F / (K + Z{e_j : j in F})`` via a Smith normal form."""
    face = tuple(sorted(face))
    G = Q.generators
    if face and field_rank(G[list(face)]) < len(face):
        raise DependentFaceNormals(f"normals of face {face} are dependent")
    S = face_lattice(Q, face)
    gens = [list(k) for k in Q.relations]
    for j in face:
        e = [0] * Q.d
        e[j] = 1
        gens.append(e)
    k = S.shape[0]
    if not gens:
        return IsotropyGroup(face, (), k)
    C = as_int_matrix([int_solve(S, g) for g in gens])
    snf = smith_normal_form(C)
    return IsotropyGroup(face, snf.nontrivial, k - snf.rank)


def polytope_faces(P: PolytopeH, vertices_only: bool = False) -> list[tuple[int, ...]]:
    """Facet index sets of faces: nonempty subsets of vertex active sets.

    Sorted by size then lexicographically; with ``vertices_only`` just the
    active sets of the vertices.
    """
    if vertices_only:
        return sorted({v.active for v in P.vertices}, key=lambda f: (len(f), f))
    faces = set()
    for v in P.vertices:
        for r in range(1, len(v.active) + 1):
            faces.update(combinations(v.active, r))
    return sorted(faces, key=lambda f: (len(f), f))


def classify(Q: Quasilattice, faces: Iterable[Sequence[int]]) -> ClassificationResult:
    groups = tuple(isotropy_group(Q, F) for F in faces)
    if any(g.free_rank > 0 for g in groups):
        kind = Classification.QUASIFOLD
    elif any(not g.is_trivial for g in groups):
        kind = Classification.ORBIFOLD
    else:
        kind = Classification.MANIFOLD
    return ClassificationResult(kind, groups)
