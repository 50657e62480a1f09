import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from quasifold import fixtures
from quasifold.exactmath import FieldScalar, as_field_matrix
from quasifold.polytope import check_simple
from quasifold.delzant import (
    LevelPoint,
    NotOnLevelSet,
    NotSimple,
    OutsidePolytope,
    act_torus,
    build_construction,
    check_regular_value,
    fiber_point,
    moment_map,
    psi,
)

R2 = FieldScalar.sqrt(2)
F = Fraction


def rows(B):
    return [list(r) for r in B]


def exact_point(rng, P):
    """Random convex combination of the vertices with rational weights."""
    w = [F(int(x)) for x in rng.integers(1, 97, size=len(P.vertices))]
    w = [x / sum(w) for x in w]
    return [sum((wk * v.coords[i] for wk, v in zip(w, P.vertices)), FieldScalar(0))
            for i in range(P.n)]


# -- build_construction ------------------------------------------------------------


def test_quasi_sphere_construction():
    D = build_construction(fixtures.quasi_sphere())
    assert rows(D.kernel_basis) == [[R2, 1]]
    assert D.dim_N == 1 and D.dim_M == 2


def test_triangle_construction():
    D = build_construction(fixtures.triangle())
    assert rows(D.kernel_basis) == [[1, 1, 1]] and D.dim_M == 4


def test_square_construction():
    D = build_construction(fixtures.square())
    assert rows(D.kernel_basis) == [[1, 0, 1, 0], [0, 1, 0, 1]] and D.dim_M == 4


def test_non_simple_rejected():
    with pytest.raises(NotSimple):
        build_construction(fixtures.square_pyramid())


def test_kernel_basis_invariants(simple_polytope):
    D = build_construction(simple_polytope)
    assert all(x == 0 for x in D.kernel_basis.dot(simple_polytope.normals).ravel())
    assert D.dim_N == D.d - D.n
    assert D.dim_M == D.dim_X - 2 * D.dim_N == 2 * D.n


# -- psi ----------------------------------------------------------------------------


def test_psi_quasi_sphere_formula():
    D = build_construction(fixtures.quasi_sphere())
    r1, r2 = F(1, 3), F(5, 7)
    (value,) = psi(D, LevelPoint((r1, r2), (0, 0)))
    assert value == R2 * r1 + r2 - R2
    # proportional to |z1|^2 + (s/t)|z2|^2 - s with s=1, t=sqrt2
    assert value == R2 * (r1 + r2 / R2 - 1)


def test_psi_square():
    D = build_construction(fixtures.square())
    assert list(psi(D, LevelPoint((1, 1, 0, 0), (0,) * 4))) == [0, 0]


def test_psi_float_mode():
    D = build_construction(fixtures.quasi_sphere())
    (value,) = psi(D, LevelPoint((0.25, 0.75 * 2 ** 0.5), (0.0, 0.0)))
    assert abs(value) < 1e-15


def test_psi_vanishes_on_fibers(simple_polytope):
    D = build_construction(simple_polytope)
    rng = np.random.default_rng(0)
    points = [v.coords for v in simple_polytope.vertices]
    points += [exact_point(rng, simple_polytope) for _ in range(20)]
    for mu in points:
        assert all(x == 0 for x in psi(D, fiber_point(D, mu)))


# -- regularity ---------------------------------------------------------------------


@pytest.mark.parametrize("make", [fixtures.quasi_sphere, fixtures.triangle])
def test_regular_value_passes(make):
    cert = check_regular_value(build_construction(make()))
    assert cert.passed and cert.offending_face is None


def test_regular_value_fails_at_pyramid_apex():
    D = build_construction(fixtures.square_pyramid(), require_simple=False)
    cert = check_regular_value(D)
    assert not cert
    assert len(cert.offending_face) == 4


@pytest.mark.parametrize("name", sorted(fixtures.ALL_SIMPLE) + ["square_pyramid"])
def test_regular_iff_simple(name):
    P = getattr(fixtures, name)()
    D = build_construction(P, require_simple=False)
    assert bool(check_regular_value(D)) == check_simple(P).is_simple


@pytest.mark.parametrize("name", sorted(fixtures.ALL_SIMPLE) + ["square_pyramid"])
def test_basis_change_keeps_zero_set_and_verdict(name):
    P = getattr(fixtures, name)()
    D = build_construction(P, require_simple=False)
    k = D.dim_N
    # unit upper triangular with an entry from the polytope's own field
    c = FieldScalar.sqrt(P.m) if P.m > 1 else FieldScalar(7)
    U = as_field_matrix([[1 if i == j else (c if i < j else 0) for j in range(k)] for i in range(k)])
    U = U * FieldScalar(F(3, 2))
    D2 = dataclasses.replace(D, kernel_basis=U.dot(D.kernel_basis))
    assert bool(check_regular_value(D2)) == bool(check_regular_value(D))
    rng = np.random.default_rng(5)
    for v in P.vertices:
        p = fiber_point(D, v.coords)
        assert all(x == 0 for x in psi(D2, p))
    # an off-level point stays off-level
    p = LevelPoint(tuple(FieldScalar(int(x)) for x in rng.integers(0, 5, size=P.d)), (0,) * P.d)
    assert all(x == 0 for x in psi(D, p)) == all(x == 0 for x in psi(D2, p))


# -- moment map and fibers ----------------------------------------------------------------


def test_moment_map_quasi_sphere_endpoints():
    D = build_construction(fixtures.quasi_sphere())
    assert list(moment_map(D, LevelPoint((0, R2), (0, 0)))) == [0]
    assert list(moment_map(D, LevelPoint((1, 0), (0, 0)))) == [1]


def test_moment_map_square():
    D = build_construction(fixtures.square())
    p = LevelPoint((F(1, 3), F(2, 3), F(2, 3), F(1, 3)), (0,) * 4)
    assert list(moment_map(D, p)) == [F(1, 3), F(2, 3)]


def test_moment_map_rejects_off_level():
    D = build_construction(fixtures.square())
    with pytest.raises(NotOnLevelSet):
        moment_map(D, LevelPoint((1, 1, 1, 1), (0,) * 4))
    with pytest.raises(NotOnLevelSet):
        moment_map(D, LevelPoint((0.5, 0.5, 0.5, 0.6), (0.0,) * 4), tol=1e-9)


def test_fiber_point_examples():
    D = build_construction(fixtures.quasi_sphere())
    assert fiber_point(D, [0]).moduli == (0, R2)
    S = build_construction(fixtures.square())
    assert fiber_point(S, [0, 0]).moduli == (0, 0, 1, 1)
    T = build_construction(fixtures.triangle())
    third = F(1, 3)
    assert fiber_point(T, [third, third]).moduli == (third,) * 3


def test_fiber_point_outside():
    D = build_construction(fixtures.square())
    with pytest.raises(OutsidePolytope):
        fiber_point(D, [2, 0])
    with pytest.raises(OutsidePolytope):
        fiber_point(D, [1.1, 0.5])
    # tolerance lets a float point just outside through
    p = fiber_point(D, [1 + 1e-12, 0.5], eps=1e-9)
    assert min(p.moduli) >= 0


def test_exact_round_trip(simple_polytope):
    P = simple_polytope
    D = build_construction(P)
    rng = np.random.default_rng(1)
    for v in P.vertices:
        assert tuple(moment_map(D, fiber_point(D, v.coords))) == v.coords
    for _ in range(100):
        mu = exact_point(rng, P)
        assert list(moment_map(D, fiber_point(D, mu))) == mu


def test_float_round_trip(simple_polytope):
    P = simple_polytope
    D = build_construction(P)
    for v in P.vertices:
        mu = v.to_float()
        back = moment_map(D, fiber_point(D, mu.tolist(), eps=1e-12))
        assert np.abs(back - mu).max() <= 1e-12


# -- torus action ------------------------------------------------------------------


def test_act_torus_identity():
    p = LevelPoint((1, 2), (F(1, 4), F(1, 2)))
    assert act_torus(p, (0, 0)) == p


def test_act_torus_wraps_phases():
    p = LevelPoint((1, 2), (F(3, 4), F(1, 2)))
    q = act_torus(p, (F(1, 2), F(1, 2)))
    assert q.phases == (F(1, 4), 0) and q.moduli == p.moduli


def test_quasi_sphere_circle_action_lies_in_subtorus_algebra():
    # (theta, theta*s/t) with s=1, t=sqrt2 is theta/sqrt2 times the row (sqrt2, 1) of B
    D = build_construction(fixtures.quasi_sphere())
    theta = F(1, 5)
    phi = (FieldScalar(theta), theta / R2)
    assert [x * R2 / theta for x in phi] == list(D.kernel_basis[0])
    p = fiber_point(D, [F(1, 2)])
    q = act_torus(p, phi)
    assert q.moduli == p.moduli
    assert q.phases[0] == theta
    assert abs(q.phases[1] - float(theta / R2) % 1) < 1e-15
    assert list(moment_map(D, q)) == list(moment_map(D, p))


def test_moment_invariant_under_torus(simple_polytope):
    D = build_construction(simple_polytope)
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = fiber_point(D, exact_point(rng, simple_polytope))
        phi = [F(int(a), int(b)) for a, b in zip(rng.integers(-50, 50, D.d), rng.integers(1, 30, D.d))]
        q = act_torus(p, phi)
        assert all(0 <= t < 1 for t in q.phases)
        assert list(moment_map(D, q)) == list(moment_map(D, p))


def test_level_point_validation():
    with pytest.raises(ValueError):
        LevelPoint((1, -1), (0, 0))
    with pytest.raises(ValueError):
        LevelPoint((1,), (0, 0))
    z = LevelPoint((4.0, 0.0), (0.25, 0.0)).coordinates()
    assert np.allclose(z, [2j, 0])
