import math
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasifold.exactmath import (
    DiscriminantMismatch,
    FieldScalar,
    as_field_matrix,
    field_arith,
    field_kernel,
    field_rank,
    hermite_normal_form,
    int_solve,
    rational_kernel,
    saturate_lattice,
    smith_normal_form,
)
from quasifold.verify import snf_oracle

from oracles import integer_kernel_basis

R2 = FieldScalar.sqrt(2)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def scalars(draw, m=None):
    m = m if m is not None else draw(st.sampled_from([2, 3, 5]))
    return FieldScalar(draw(fractions), draw(fractions), m)


# -- field arithmetic ---------------------------------------------------------


def test_conjugate_product():
    assert field_arith(1 + R2, 1 - R2, "mul") == -1


def test_rationalization():
    assert field_arith(1, 1 + R2, "div") == -1 + R2


def test_componentwise_add():
    x = FieldScalar(Fraction(1, 2), 0, 5)
    y = FieldScalar(0, Fraction(1, 3), 5)
    assert field_arith(x, y, "add") == FieldScalar(Fraction(1, 2), Fraction(1, 3), 5)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        field_arith(R2, FieldScalar(0, 0, 2), "div")


def test_discriminant_mismatch():
    with pytest.raises(DiscriminantMismatch):
        R2 + FieldScalar.sqrt(3)
    # rationals mix with any field
    assert (R2 + FieldScalar(1, 0, 3)).m == 2


def test_m_one_is_canonical_rational():
    x = FieldScalar(1, 2, 1)
    assert x.b == 0 and x.a == 3


@given(scalars(m=2), scalars(m=2), scalars(m=2))
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    if x:
        assert x * (1 / x) == 1


@given(scalars())
def test_sign_matches_float(x):
    f = float(x)
    if abs(f) > 1e-9:
        assert x.sign() == (1 if f > 0 else -1)
    assert (x.sign() == 0) == (not x)


@given(scalars(m=5), scalars(m=5))
def test_order_is_total_and_consistent(x, y):
    assert (x < y) + (x == y) + (x > y) == 1
    assert (x < y) == (y - x > 0)


# -- kernels ------------------------------------------------------------------


def _leibniz(M):
    k = len(M)
    total = FieldScalar(0)
    for perm in permutations(range(k)):
        sgn = -1 if sum(perm[i] > perm[j] for i in range(k) for j in range(i + 1, k)) % 2 else 1
        term = FieldScalar(sgn)
        for i in range(k):
            term = term * M[i][perm[i]]
        total = total + term
    return total


def _rank_by_minors(M):
    """Largest k with a nonzero k x k minor."""
    rows, cols = len(M), len(M[0])
    for k in range(min(rows, cols), 0, -1):
        for R in combinations(range(rows), k):
            for C in combinations(range(cols), k):
                if _leibniz([[M[i][j] for j in C] for i in R]):
                    return k
    return 0


def test_field_kernel_examples():
    B = field_kernel([[1, -R2]])
    assert B.shape == (1, 2) and list(B[0]) == [R2, 1]
    assert field_kernel([[1, 0], [0, 1]]).shape[0] == 0
    B = field_kernel([[1, 0, -1, 0], [0, 1, 0, -1]])
    assert [list(r) for r in B] == [[1, 0, 1, 0], [0, 1, 0, 1]]


def test_rational_kernel_examples():
    assert rational_kernel([[1, -R2]]).shape[0] == 0
    assert [list(r) for r in rational_kernel([[1, -1]])] == [[1, 1]]
    assert [list(r) for r in rational_kernel([[1, -2]])] == [[2, 1]]


@st.composite
def field_matrices(draw):
    rows = draw(st.integers(1, 3))
    cols = draw(st.integers(1, 4))
    small = st.integers(-3, 3)
    return [[FieldScalar(draw(small), draw(small), 2) for _ in range(cols)] for _ in range(rows)]


@given(field_matrices())
@settings(max_examples=60, deadline=None)
def test_field_kernel_properties(M):
    A = as_field_matrix(M)
    B = field_kernel(A)
    for v in B:
        assert all(x == 0 for x in A.dot(v))
    assert B.shape[0] + _rank_by_minors(M) == A.shape[1]
    if B.shape[0]:
        assert field_rank(B) == B.shape[0]


@given(field_matrices())
@settings(max_examples=60, deadline=None)
def test_rational_kernel_annihilates(M):
    A = as_field_matrix(M)
    for v in rational_kernel(A):
        assert all(isinstance(x, Fraction) for x in v)
        assert all(x == 0 for x in A.dot(np.array([FieldScalar(x) for x in v], dtype=object)))


# -- Smith normal form ----------------------------------------------------------


@pytest.mark.parametrize("A, factors, rank", [
    ([[2, 1], [1, 0]], (1, 1), 2),
    ([[2, 0], [0, 4]], (2, 4), 2),
    ([[2, 0], [0, 0]], (2,), 1),
    ([[6, 4], [4, 6]], (2, 10), 2),
])
def test_snf_examples(A, factors, rank):
    snf = smith_normal_form(A)
    assert snf.factors == factors and snf.rank == rank
    assert snf_oracle(A) == factors


def test_snf_unit_determinant_case():
    # |det| = 1 forces both invariant factors to be 1
    assert abs(2 * 0 - 1 * 1) == 1
    assert smith_normal_form([[2, 1], [1, 0]]).nontrivial == ()


def _int_det(M):
    return int(_leibniz([[FieldScalar(x) for x in row] for row in M]).a)


@pytest.mark.parametrize("size", [3, 4])
def test_snf_matches_minor_gcds(size):
    rng = np.random.default_rng(size)
    for _ in range(60):
        A = rng.integers(-5, 6, size=(size, size)).tolist()
        snf = smith_normal_form(A)
        prod = 1
        for k, f in enumerate(snf.factors, start=1):
            prod *= f
            g = 0
            for R in combinations(range(size), k):
                for C in combinations(range(size), k):
                    g = math.gcd(g, _int_det([[A[i][j] for j in C] for i in R]))
            assert prod == g


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4))
@settings(max_examples=80, deadline=None)
def test_snf_transforms(A):
    snf = smith_normal_form(A, transforms=True)
    M = np.array(A, dtype=object)
    assert (snf.U.dot(M).dot(snf.V) == snf.D).all()
    assert (snf.V.dot(snf.V_inv) == np.eye(3, dtype=int)).all()
    assert abs(_int_det(snf.U.tolist())) == 1
    for a, b in zip(snf.factors, snf.factors[1:]):
        assert b % a == 0
    assert all(f > 0 for f in snf.factors)


# -- lattices -----------------------------------------------------------------------


def test_saturate_examples():
    assert saturate_lattice([[Fraction(1, 2), Fraction(1, 2)]]).tolist() == [[1, 1]]
    assert saturate_lattice([[1, 1], [0, 2]]).tolist() == [[1, 0], [0, 1]]
    assert saturate_lattice([[2, 4]]).tolist() == [[1, 2]]


@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=3))
@settings(max_examples=80, deadline=None)
def test_saturation_unimodular_to_independent_basis(A):
    mine = saturate_lattice(rational_kernel(A), dim=4)
    other = integer_kernel_basis(A)
    assert mine.shape[0] == len(other)
    if not other:
        return
    # each basis expresses the other with integer coefficients, transition |det| = 1
    T = [int_solve(mine, v) for v in other]
    snf = smith_normal_form(T)
    assert snf.rank == len(other) and snf.nontrivial == ()
    for v in mine:
        int_solve(np.array(other, dtype=object), list(v))
    assert (hermite_normal_form(other) == mine).all()


def test_saturate_generates_all_integer_points():
    B = [[Fraction(1, 3), Fraction(2, 3), 0], [0, Fraction(1, 2), Fraction(1, 2)]]
    S = saturate_lattice(B)
    span = as_field_matrix(B)
    for x in np.ndindex(5, 5, 5):
        v = [c - 2 for c in x]
        in_span = field_rank(np.vstack([span, as_field_matrix([v])])) == 2
        if in_span:
            int_solve(S, v)  # raises if not an integer combination


def test_hnf_is_canonical():
    assert (hermite_normal_form([[2, 4], [1, 1]]) == hermite_normal_form([[1, 1], [0, 2]])).all()
    assert hermite_normal_form([[0, 0]]).shape[0] == 0
