"""Exact dense linear algebra over prime fields.

Matrices are immutable wrappers around 2-d numpy int64 arrays with all
entries reduced mod p. Every operation is pure and deterministic; in
particular `solve` always returns the canonical solution with zeros in
all non-pivot coordinates, so identical inputs give identical outputs.

The array-level helpers (`rref_array`, `solve_array`, ...) do the actual
work and are reused by the higher modules, which keep their own
coordinate layouts and only need raw vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameter


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    """Arithmetic context for the field with p elements.

    Elements are plain python/numpy integers in [0, p); the context owns
    the modulus and the inversion rule. Primality is checked once here.
    """

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidParameter(f"modulus {self.p} is not prime")

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def array(self, data) -> np.ndarray:
        return np.asarray(data, dtype=np.int64) % self.p


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.flags.writeable = False
    return a


def rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of `a` mod p and its pivot columns."""
    r = np.array(a, dtype=np.int64) % p
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = (r[row] * pow(int(r[row, col]), p - 2, p)) % p
        other = np.nonzero(r[:, col])[0]
        other = other[other != row]
        if other.size:
            r[other] = (r[other] - np.outer(r[other, col], r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rank_array(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref_array(a, p)[1])


def solve_array(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Canonical solution of a x = b mod p, or None when inconsistent.

    Canonical means: non-pivot coordinates are zero.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 1 or a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"solve with shapes {a.shape} and {b.shape}")
    aug = np.concatenate([a % p, (b % p).reshape(-1, 1)], axis=1)
    r, pivots = rref_array(aug, p)
    if a.shape[1] in pivots:
        return None
    x = np.zeros(a.shape[1], dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = r[i, -1]
    return x


def kernel_basis_array(a: np.ndarray, p: int) -> list[np.ndarray]:
    """Echelonized basis of the right null space, one vector per free column."""
    a = np.asarray(a, dtype=np.int64)
    r, pivots = rref_array(a, p)
    pivot_set = set(pivots)
    basis = []
    for j in range(a.shape[1]):
        if j in pivot_set:
            continue
        v = np.zeros(a.shape[1], dtype=np.int64)
        v[j] = 1
        for i, c in enumerate(pivots):
            v[c] = (-int(r[i, j])) % p
        basis.append(v)
    return basis


class SolveContext:
    """Repeated canonical solves against one fixed matrix.

    Eliminates [m | I] once; afterwards each solve is a single matrix-vector
    product plus a consistency check, with the same canonical answer that
    `solve_array` would give.
    """

    def __init__(self, m: np.ndarray, p: int):
        m = np.asarray(m, dtype=np.int64) % p
        self.p = p
        self.cols = m.shape[1]
        aug = np.concatenate([m, np.eye(m.shape[0], dtype=np.int64)], axis=1)
        r, pivots = rref_array(aug, p)
        self.pivots = [c for c in pivots if c < self.cols]
        self.rank = len(self.pivots)
        self.reduced = r[: self.rank, : self.cols]
        self.transform = r[:, self.cols:]

    def solve(self, b: np.ndarray) -> np.ndarray | None:
        y = (self.transform @ (np.asarray(b, dtype=np.int64) % self.p)) % self.p
        if np.any(y[self.rank:]):
            return None
        x = np.zeros(self.cols, dtype=np.int64)
        for i, c in enumerate(self.pivots):
            x[c] = y[i]
        return x


class Matrix:
    """Immutable dense matrix over a prime field."""

    __slots__ = ("field", "array")

    def __init__(self, field: PrimeField, array):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "array", _frozen(field.array(array)))
        if self.array.ndim != 2:
            raise DimensionMismatch("matrix data must be two-dimensional")

    def __setattr__(self, *args):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_rows(cls, field: PrimeField, rows) -> "Matrix":
        return cls(field, rows)

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field.p == other.field.p
            and self.array.shape == other.array.shape
            and bool(np.array_equal(self.array, other.array))
        )

    def __hash__(self):
        return hash((self.field.p, self.array.shape, self.array.tobytes()))

    def __repr__(self):
        return f"Matrix(p={self.field.p}, {self.array.tolist()})"

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.array.shape} @ {other.array.shape}")
        return Matrix(self.field, self.array @ other.array)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.array.shape != other.array.shape:
            raise DimensionMismatch(f"{self.array.shape} + {other.array.shape}")
        return Matrix(self.field, self.array + other.array)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.array.shape != other.array.shape:
            raise DimensionMismatch(f"{self.array.shape} - {other.array.shape}")
        return Matrix(self.field, self.array - other.array)

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, -self.array)

    def scale(self, c: int) -> "Matrix":
        return Matrix(self.field, self.array * (int(c) % self.field.p))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.array.T)

    def is_zero(self) -> bool:
        return not np.any(self.array)

    def rref(self) -> tuple["Matrix", list[int]]:
        r, pivots = rref_array(self.array, self.field.p)
        return Matrix(self.field, r), pivots

    def rank(self) -> int:
        return rank_array(self.array, self.field.p)

    def apply(self, v) -> np.ndarray:
        v = self.field.array(v)
        if v.shape != (self.cols,):
            raise DimensionMismatch(f"{self.array.shape} applied to {v.shape}")
        return (self.array @ v) % self.field.p


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form and pivot columns; the RREF is unique."""
    return m.rref()


def solve(a: Matrix, b) -> np.ndarray | None:
    """Canonical particular solution of a x = b, or None when inconsistent.

    The right-hand side is a length-`a.rows` vector; free coordinates of
    the solution are pinned to zero.
    """
    b = a.field.array(b)
    if b.ndim != 1 or b.shape[0] != a.rows:
        raise DimensionMismatch(f"matrix {a.array.shape} with rhs {b.shape}")
    return solve_array(a.array, b, a.field.p)


def kernel_basis(a: Matrix) -> list[np.ndarray]:
    """Echelonized basis of the right null space of `a`."""
    return kernel_basis_array(a.array, a.field.p)
