"""Exact dense linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries in [0, p). Actions are applied
to column vectors (v -> A @ v). A subspace is stored as a matrix whose ROWS
span it; every function returning a subspace returns a reduced row basis.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Products of two entries must stay exact in int64 after summation.
MAX_MODULUS = 1 << 16


# =====================================================
# SCALARS
# =====================================================

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def check_modulus(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if p >= MAX_MODULUS:
        raise ValueError(f"modulus {p} exceeds supported bound {MAX_MODULUS}")
    return p


def inv_mod(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class FpScalar:
    """Element of F_p."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise ValueError("scalars over different fields")
            return other.value
        return int(other)

    def __add__(self, other):
        return FpScalar(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FpScalar(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FpScalar(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FpScalar(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.p)

    def inverse(self) -> "FpScalar":
        return FpScalar(inv_mod(self.value, self.p), self.p)

    def __truediv__(self, other):
        return self * FpScalar(self._coerce(other), self.p).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FpScalar(pow(self.value, k, self.p), self.p)

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FpScalar):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))


# =====================================================
# ARRAY HELPERS
# =====================================================

def mod_p(a, p: int) -> np.ndarray:
    """Copy of `a` as an int64 array reduced into [0, p)."""
    return np.array(a, dtype=np.int64, copy=True) % p


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a, b, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


def _as_2d(a, p: int) -> np.ndarray:
    arr = mod_p(a, p)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {arr.shape}")
    return arr


# =====================================================
# ELIMINATION
# =====================================================

def rref(a, p: int) -> Tuple[np.ndarray, int, list]:
    """Reduced row echelon form.

    Returns (R, rank, pivot_columns). R has the shape of `a`; its first
    `rank` rows are the reduced basis of the row space.
    """
    A = _as_2d(a, p)
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r, c:] = (A[r, c:] * inv_mod(A[r, c], p)) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            A[rows, c:] = (A[rows, c:] - np.outer(col[rows], A[r, c:])) % p
        pivots.append(c)
        r += 1
    return A, r, pivots


def rank(a, p: int) -> int:
    arr = np.asarray(a)
    if arr.size == 0:
        return 0
    return rref(arr, p)[1]


def row_space(a, p: int) -> np.ndarray:
    arr = np.asarray(a)
    if arr.ndim == 2 and arr.shape[0] == 0:
        return zeros(0, arr.shape[1])
    R, r, _ = rref(arr, p)
    return R[:r].copy()


def column_space(a, p: int) -> np.ndarray:
    """Rows spanning the column space of `a`."""
    return row_space(np.asarray(a).T, p)


def kernel_basis(a, p: int) -> np.ndarray:
    """Rows spanning {v : a @ v = 0}."""
    arr = np.asarray(a)
    n = arr.shape[1]
    if arr.shape[0] == 0:
        return identity(n)
    R, r, pivots = rref(arr, p)
    free = [j for j in range(n) if j not in set(pivots)]
    K = zeros(len(free), n)
    if free:
        K[np.arange(len(free)), free] = 1
        if pivots:
            K[:, pivots] = (-R[:r][:, free].T) % p
    return K


def solve_matrix(a, b, p: int) -> Optional[np.ndarray]:
    """One solution X of a @ X = b, or None when the system is inconsistent."""
    A = np.asarray(a, dtype=np.int64)
    B = np.asarray(b, dtype=np.int64)
    vector = B.ndim == 1
    if vector:
        B = B.reshape(-1, 1)
    m, n = A.shape
    if B.shape[0] != m:
        raise ValueError(f"shape mismatch: {A.shape} and {B.shape}")
    R, r, pivots = rref(np.hstack([A, B]), p)
    if any(c >= n for c in pivots):
        return None
    X = zeros(n, B.shape[1])
    for i, c in enumerate(pivots):
        X[c] = R[i, n:]
    return X[:, 0] if vector else X


def solve(a, b, p: int) -> Optional[np.ndarray]:
    return solve_matrix(a, np.asarray(b).reshape(-1), p)


def inverse(a, p: int) -> np.ndarray:
    A = np.asarray(a)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"cannot invert non-square matrix of shape {A.shape}")
    X = solve_matrix(A, identity(n), p)
    if X is None or rank(A, p) != n:
        raise ZeroDivisionError("matrix is singular")
    return X


# =====================================================
# SUBSPACES
# =====================================================

def subspace_sum(a, b, p: int) -> np.ndarray:
    return row_space(np.vstack([a, b]), p)


def subspace_intersection(a, b, p: int) -> np.ndarray:
    A = row_space(a, p)
    B = row_space(b, p)
    n = A.shape[1]
    if A.shape[0] == 0 or B.shape[0] == 0:
        return zeros(0, n)
    K = kernel_basis(np.vstack([A, (-B) % p]).T, p)
    return row_space(matmul(K[:, : A.shape[0]], A, p), p)


def subspace_contains(a, b, p: int) -> bool:
    """True when every row of `b` lies in the row space of `a`."""
    B = np.asarray(b)
    if B.ndim == 1:
        B = B.reshape(1, -1)
    if B.shape[0] == 0:
        return True
    A = np.asarray(a)
    return rank(np.vstack([A, B]), p) == rank(A, p)


@dataclass(frozen=True)
class SubspaceOps:
    sum: np.ndarray
    intersection: np.ndarray
    a_contains_b: bool
    b_contains_a: bool


def subspace_ops(a, b, p: int) -> SubspaceOps:
    return SubspaceOps(
        sum=subspace_sum(a, b, p),
        intersection=subspace_intersection(a, b, p),
        a_contains_b=subspace_contains(a, b, p),
        b_contains_a=subspace_contains(b, a, p),
    )


def quotient_projection(basis, n: int, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """Coordinates on k^n / span(basis).

    Returns (Q, C): Q is (n-s) x n and kills the subspace, C is n x (n-s)
    with Q @ C = I. The quotient coordinates are the non-pivot positions of
    the reduced basis.
    """
    B = np.asarray(basis, dtype=np.int64)
    if B.size == 0:
        return identity(n), identity(n)
    B = B.reshape(-1, n)
    R, r, pivots = rref(B, p)
    R = R[:r]
    free = [j for j in range(n) if j not in set(pivots)]
    Q = zeros(len(free), n)
    Q[np.arange(len(free)), free] = 1
    if pivots:
        # x_free - R[:, free]^T x_piv
        Q[:, pivots] = (-R[:, free].T) % p
    C = zeros(n, len(free))
    C[free, np.arange(len(free))] = 1
    return Q, C


# =====================================================
# MATRIX WRAPPER
# =====================================================

@dataclass(frozen=True, eq=False)
class FpMatrix:
    """Immutable matrix over F_p."""

    data: np.ndarray
    p: int

    def __post_init__(self):
        p = check_modulus(self.p)
        arr = _as_2d(self.data, p)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, cols: int | None = None) -> "FpMatrix":
        if len(rows) == 0:
            return cls(zeros(0, cols or 0), p)
        return cls(np.array(rows, dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(identity(n), p)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def tolist(self) -> list:
        return self.data.tolist()

    def rref(self) -> Tuple["FpMatrix", int, list]:
        R, r, piv = rref(self.data, self.p)
        return FpMatrix(R, self.p), r, piv

    def rank(self) -> int:
        return rank(self.data, self.p)

    def kernel_basis(self) -> "FpMatrix":
        return FpMatrix(kernel_basis(self.data, self.p), self.p)

    def row_space(self) -> "FpMatrix":
        return FpMatrix(row_space(self.data, self.p), self.p)

    def solve(self, b) -> Optional[np.ndarray]:
        rhs = b.data if isinstance(b, FpMatrix) else b
        return solve_matrix(self.data, rhs, self.p)

    def inverse(self) -> "FpMatrix":
        return FpMatrix(inverse(self.data, self.p), self.p)

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix(self.data.T, self.p)

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            if other.p != self.p:
                raise ValueError("matrices over different fields")
            return FpMatrix(matmul(self.data, other.data, self.p), self.p)
        return matmul(self.data, other, self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.data + other.data, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.data - other.data, self.p)

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.p, self.shape, self.data.tobytes()))

    def __repr__(self):
        return f"FpMatrix(p={self.p}, shape={self.shape})"
