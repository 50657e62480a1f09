"""Standard polytopes used by the tests, the benchmark and the sample configs."""
from __future__ import annotations

from .exactmath import FieldScalar
from .polytope import PolytopeH

__all__ = [
    "square",
    "triangle",
    "pentagon",
    "quasi_sphere",
    "weighted_sphere",
    "square_pyramid",
    "ALL_SIMPLE",
]


def square() -> PolytopeH:
    """Unit square: normals e1, e2, -e1, -e2."""
    return PolytopeH([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, -1, -1])


def triangle() -> PolytopeH:
    """Standard simplex, the moment polytope of CP^2."""
    return PolytopeH([[1, 0], [0, 1], [-1, -1]], [0, 0, -1])


def pentagon() -> PolytopeH:
    """Pentagon over Q(sqrt 5) with normals in the golden-ratio frame.

    ``u_{k+1} = c*u_k - u_{k-1}`` with ``c = 2cos(2pi/5) = (sqrt5 - 1)/2``
    starting from ``e1, e2``; this is a linear image of the regular pentagon's
    normals, so the five normals sum to zero. All offsets are -1.
    """
    c = FieldScalar("-1/2", "1/2", 5)
    u = [(FieldScalar(1), FieldScalar(0)), (FieldScalar(0), FieldScalar(1))]
    while len(u) < 5:
        (a0, b0), (a1, b1) = u[-2], u[-1]
        u.append((c * a1 - a0, c * b1 - b0))
    return PolytopeH([list(v) for v in u], [-1] * 5)


def quasi_sphere(s=1, t=None) -> PolytopeH:
    """Interval ``[0, 1]`` cut out by normals ``(s, -t)`` and offsets ``(0, -t)``.

    Defaults to ``s = 1, t = sqrt(2)``.
    """
    if t is None:
        t = FieldScalar.sqrt(2)
    s, t = FieldScalar._coerce(s), FieldScalar._coerce(t)
    return PolytopeH([[s], [-t]], [0, -t])


def weighted_sphere() -> PolytopeH:
    """Interval ``[0, 1]`` with normals ``(1, -2)``: the teardrop orbifold."""
    return PolytopeH([[1], [-2]], [0, -2])


def square_pyramid() -> PolytopeH:
    """Pyramid over ``[-1, 1]^2`` with apex ``(0, 0, 1)``; not simple at the apex."""
    return PolytopeH(
        [[0, 0, 1], [-1, 0, -1], [1, 0, -1], [0, -1, -1], [0, 1, -1]],
        [0, -1, -1, -1, -1],
    )


ALL_SIMPLE = {
    "square": square,
    "triangle": triangle,
    "pentagon": pentagon,
    "quasi_sphere": quasi_sphere,
    "weighted_sphere": weighted_sphere,
}
