"""Exact arithmetic in a real quadratic field and exact integer/rational linear algebra.

Every scalar is a :class:`FieldScalar` ``a + b*sqrt(m)`` with rational ``a, b``.
Matrices are numpy arrays of ``dtype=object`` holding FieldScalars (field
matrices) or Python ints (lattice matrices), so products and sums stay exact.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np


class DiscriminantMismatch(ValueError):
    """Two scalars from different quadratic fields were combined."""


def is_squarefree(m: int) -> bool:
    if m < 1:
        return False
    k = 2
    while k * k <= m:
        if m % (k * k) == 0:
            return False
        k += 1
    return True


class FieldScalar:
    """Exact element ``a + b*sqrt(m)`` of Q(sqrt(m)), ``m`` square-free.

    Rational values (``b == 0``) combine freely with any field; two irrational
    values must share ``m``.
    """

    __slots__ = ("a", "b", "m")

    def __init__(self, a=0, b=0, m: int = 1):
        a = Fraction(a)
        b = Fraction(b)
        m = int(m)
        if m < 1:
            raise ValueError(f"discriminant must be >= 1, got {m}")
        if m == 1:
            a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("FieldScalar is immutable")

    def __reduce__(self):
        return (FieldScalar, (self.a, self.b, self.m))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def sqrt(cls, m: int) -> "FieldScalar":
        """``sqrt(m)`` for square-free ``m``."""
        if not is_squarefree(m):
            raise ValueError(f"{m} is not square-free")
        return cls(0, 1, m)

    @staticmethod
    def _coerce(x) -> "FieldScalar":
        if isinstance(x, FieldScalar):
            return x
        if isinstance(x, (int, Rational)):
            return FieldScalar(x)
        return NotImplemented

    def _common_m(self, other: "FieldScalar") -> int:
        if self.m == other.m:
            return self.m
        if other.b == 0:
            return self.m
        if self.b == 0:
            return other.m
        raise DiscriminantMismatch(f"sqrt({self.m}) vs sqrt({other.m})")

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.a + o.a, self.b + o.b, self._common_m(o))

    __radd__ = __add__

    def __neg__(self):
        return FieldScalar(-self.a, -self.b, self.m)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.a - o.a, self.b - o.b, self._common_m(o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        m = self._common_m(o)
        return FieldScalar(
            self.a * o.a + self.b * o.b * m,
            self.a * o.b + self.b * o.a,
            m,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "FieldScalar":
        return FieldScalar(self.a, -self.b, self.m)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - b^2 m``."""
        return self.a * self.a - self.b * self.b * self.m

    def inverse(self) -> "FieldScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("FieldScalar division by zero")
        return FieldScalar(self.a / n, -self.b / n, self.m)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        self._common_m(o)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    # -- comparison -----------------------------------------------------------

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 against b^2 m
        d = a * a - b * b * self.m
        return sa if d > 0 else (sb if d < 0 else 0)

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.a != o.a or self.b != o.b:
            return False
        return self.b == 0 or self.m == o.m

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.m))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversions ----------------------------------------------------------

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        if self.b == 0:
            return float(self.a)
        # evaluate in the direction that avoids cancellation
        s = math.sqrt(self.m)
        av, bv = float(self.a), float(self.b) * s
        if (av >= 0) == (bv >= 0) or self.a == 0:
            return av + bv
        return float(self.norm()) / (av - bv)

    def __repr__(self):
        if self.b == 0:
            return f"FieldScalar({self.a})"
        return f"FieldScalar({self.a}, {self.b}, {self.m})"

    def __str__(self):
        return format_scalar(self)


def format_scalar(x: FieldScalar) -> str:
    """Render as ``p/q`` or ``p/q + p'/q'*sqrt(m)``; parseable by the config reader."""
    x = FieldScalar._coerce(x)

    def frac(f: Fraction) -> str:
        return f"{f.numerator}/{f.denominator}"

    if x.b == 0:
        return frac(x.a)
    sign = "+" if x.b > 0 else "-"
    return f"{frac(x.a)} {sign} {frac(abs(x.b))}*sqrt({x.m})"


def field_arith(x, y, op: str) -> FieldScalar:
    """Apply ``op`` in {add, sub, mul, div} to two scalars of the same field."""
    x, y = FieldScalar._coerce(x), FieldScalar._coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# matrices


def as_field_matrix(rows) -> np.ndarray:
    """Object array of FieldScalars; checks shape and a common discriminant."""
    arr = np.array(rows, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    out = np.empty(arr.shape, dtype=object)
    ms = set()
    for idx, v in np.ndenumerate(arr):
        s = FieldScalar._coerce(v)
        if s is NotImplemented:
            raise TypeError(f"not an exact scalar: {v!r}")
        if s.b != 0:
            ms.add(s.m)
        out[idx] = s
    if len(ms) > 1:
        raise DiscriminantMismatch(f"mixed discriminants {sorted(ms)}")
    return out


def discriminant_of(values: Iterable) -> int:
    ms = {FieldScalar._coerce(v).m for v in values if FieldScalar._coerce(v).b != 0}
    if len(ms) > 1:
        raise DiscriminantMismatch(f"mixed discriminants {sorted(ms)}")
    return ms.pop() if ms else 1


def _rref(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the field of the entries (or Q for Fractions)."""
    R = M.copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if R[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = R[r] / R[r, c]
        for i in range(rows):
            if i != r and R[i, c] != 0:
                R[i] = R[i] - R[i, c] * R[r]
        pivots.append(c)
        r += 1
    return R, pivots


def _nullspace(M: np.ndarray, zero) -> np.ndarray:
    rows, cols = M.shape
    R, pivots = _rref(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.empty((len(free), cols), dtype=object)
    basis[:] = zero
    for k, f in enumerate(free):
        basis[k, f] = zero + 1
        for i, p in enumerate(pivots):
            basis[k, p] = -R[i, f]
    return basis


def field_rank(M) -> int:
    M = as_field_matrix(M)
    if M.size == 0:
        return 0
    return len(_rref(M)[1])


def field_kernel(M) -> np.ndarray:
    """Basis of ``{v : M v = 0}`` over the field, one vector per row.

    Each basis vector is 1 on one free column and 0 on the other free columns.
    """
    M = as_field_matrix(M)
    return _nullspace(M, FieldScalar(0))


def split_rational(M) -> np.ndarray:
    """Stack rational and sqrt(m) parts of each row: an equivalent system over Q."""
    M = as_field_matrix(M)
    rows, cols = M.shape
    out = np.empty((2 * rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            out[2 * i, j] = M[i, j].a
            out[2 * i + 1, j] = M[i, j].b
    return out


def rational_kernel(M) -> np.ndarray:
    """Basis (rows of Fractions) of ``{v in Q^cols : M v = 0}``."""
    return _nullspace(split_rational(M), Fraction(0))


def rational_rank(M) -> int:
    """Rank of the columns of ``M`` as vectors over Q."""
    S = split_rational(M)
    if S.size == 0:
        return 0
    return len(_rref(S)[1])


def field_solve(A, b) -> np.ndarray:
    """Unique solution of the square system ``A x = b``; raises if singular."""
    A = as_field_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("field_solve needs a square matrix")
    aug = np.concatenate([A, as_field_matrix(list(b)).reshape(n, 1)], axis=1)
    R, pivots = _rref(aug)
    if pivots != list(range(n)):
        raise np.linalg.LinAlgError("singular system")
    return R[:, n].copy()


def field_inverse(A) -> np.ndarray:
    A = as_field_matrix(A)
    n = A.shape[0]
    eye = as_field_matrix([[int(i == j) for j in range(n)] for i in range(n)])
    R, pivots = _rref(np.concatenate([A, eye], axis=1))
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    return R[:, n:].copy()


# ---------------------------------------------------------------------------
# integer lattices


def as_int_matrix(rows) -> np.ndarray:
    arr = np.array(rows, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if Fraction(v).denominator != 1:
            raise ValueError(f"non-integer entry {v!r}")
        out[idx] = int(v)
    return out


def _identity(n: int) -> np.ndarray:
    eye = np.zeros((n, n), dtype=object)
    for i in range(n):
        eye[i, i] = 1
    return eye


class SmithForm:
    """Result of :func:`smith_normal_form`.

    ``factors`` are all nonzero diagonal entries (including 1s) in divisibility
    order; ``U @ A @ V == D`` when transforms were requested.
    """

    __slots__ = ("factors", "rank", "D", "U", "V", "V_inv")

    def __init__(self, factors, rank, D=None, U=None, V=None, V_inv=None):
        self.factors = tuple(factors)
        self.rank = rank
        self.D, self.U, self.V, self.V_inv = D, U, V, V_inv

    @property
    def nontrivial(self) -> tuple[int, ...]:
        return tuple(f for f in self.factors if f != 1)

    def __iter__(self):
        return iter((self.factors, self.rank))

    def __repr__(self):
        return f"SmithForm(factors={self.factors}, rank={self.rank})"


def smith_normal_form(A, transforms: bool = False) -> SmithForm:
    """Smith normal form of an integer matrix by smallest-entry pivoting."""
    D = as_int_matrix(A).copy()
    if D.ndim != 2:
        D = D.reshape(0, 0)
    rows, cols = D.shape
    U = _identity(rows)
    V = _identity(cols)
    Vi = _identity(cols)

    def swap_rows(i, j):
        if i != j:
            D[[i, j]] = D[[j, i]]
            U[[i, j]] = U[[j, i]]

    def swap_cols(i, j):
        if i != j:
            D[:, [i, j]] = D[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]
            Vi[[i, j]] = Vi[[j, i]]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = D[dst] + q * D[src]
        U[dst] = U[dst] + q * U[src]

    def add_col(dst, src, q):  # col_dst += q * col_src
        D[:, dst] = D[:, dst] + q * D[:, src]
        V[:, dst] = V[:, dst] + q * V[:, src]
        Vi[src] = Vi[src] - q * Vi[dst]

    def move_smallest_to(t, cells):
        i, j = min(cells, key=lambda ij: abs(D[ij]))
        swap_rows(t, i)
        swap_cols(t, j)

    t = 0
    while t < min(rows, cols):
        cells = [(i, j) for i in range(t, rows) for j in range(t, cols) if D[i, j] != 0]
        if not cells:
            break
        move_smallest_to(t, cells)
        while True:
            p = D[t, t]
            for i in range(t + 1, rows):
                if D[i, t] != 0:
                    add_row(i, t, -(D[i, t] // p))
            for j in range(t + 1, cols):
                if D[t, j] != 0:
                    add_col(j, t, -(D[t, j] // p))
            rest = [(i, t) for i in range(t + 1, rows) if D[i, t] != 0]
            rest += [(t, j) for j in range(t + 1, cols) if D[t, j] != 0]
            if rest:
                move_smallest_to(t, rest + [(t, t)])
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if D[i, j] % p != 0),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
        t += 1

    factors = [D[i, i] for i in range(t)]
    if transforms:
        return SmithForm(factors, t, D, U, V, Vi)
    return SmithForm(factors, t)


def hermite_normal_form(A) -> np.ndarray:
    """Row-style Hermite normal form with zero rows dropped.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``; two integer matrices have the same row lattice iff their
    HNFs are equal.
    """
    H = as_int_matrix(A).copy()
    if H.size == 0:
        return H.reshape(0, H.shape[1] if H.ndim == 2 else 0)
    rows, cols = H.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if H[i, c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i, c]))
            if p != r:
                H[[r, p]] = H[[p, r]]
            done = True
            for i in range(r + 1, rows):
                if H[i, c] != 0:
                    H[i] = H[i] - (H[i, c] // H[r, c]) * H[r]
                    if H[i, c] != 0:
                        done = False
            if done:
                break
        if H[r, c] == 0:
            continue
        if H[r, c] < 0:
            H[r] = -H[r]
        for i in range(r):
            H[i] = H[i] - (H[i, c] // H[r, c]) * H[r]
        r += 1
    return H[:r].copy()


def clear_denominators(v: Sequence) -> list[int]:
    fr = [Fraction(x) for x in v]
    lcm = 1
    for f in fr:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    return [int(f * lcm) for f in fr]


def saturate_lattice(B, dim: int | None = None) -> np.ndarray:
    """Integer basis (HNF rows) of ``V ∩ Z^d`` where ``V`` is the Q-span of the rows of ``B``."""
    rows = [clear_denominators(row) for row in np.asarray(B, dtype=object)]
    if not rows:
        return np.empty((0, dim or 0), dtype=object)
    A = as_int_matrix(rows)
    snf = smith_normal_form(A, transforms=True)
    # rows of A span the rows of D @ V^-1; saturation keeps the first r rows of V^-1
    return hermite_normal_form(snf.V_inv[: snf.rank])


def int_solve(basis: np.ndarray, v: Sequence) -> list[int]:
    """Integer coefficients ``c`` with ``c @ basis == v``; raises ValueError if none exist."""
    basis = np.asarray(basis, dtype=object)
    k = basis.shape[0]
    if k == 0:
        if any(x != 0 for x in v):
            raise ValueError("vector not in the zero lattice")
        return []
    # transpose system: basis.T c = v over Q
    aug = np.empty((basis.shape[1], k + 1), dtype=object)
    aug[:, :k] = [[Fraction(x) for x in col] for col in basis.T]
    aug[:, k] = [Fraction(x) for x in v]
    R, pivots = _rref(aug)
    if k in pivots or len(pivots) < k:
        raise ValueError("vector not in the span of the basis")
    c = [R[i, k] for i in range(k)]
    if any(x.denominator != 1 for x in c):
        raise ValueError("vector not in the lattice")
    return [int(x) for x in c]
