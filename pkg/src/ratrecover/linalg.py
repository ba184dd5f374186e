"""Exact dense linear algebra over F_q: echelon forms, rank, right kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldMismatchError, FieldParams


@dataclass
class FqMatrix:
    field: FieldParams
    entries: np.ndarray

    def __post_init__(self):
        arr = self.field.array(self.entries)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        self.entries = arr

    @classmethod
    def zeros(cls, field: FieldParams, rows: int, cols: int) -> "FqMatrix":
        return cls(field, np.zeros((rows, cols), dtype=field.dtype))

    @classmethod
    def identity(cls, field: FieldParams, size: int) -> "FqMatrix":
        return cls(field, np.eye(size, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other):
        q = self.field.q
        if isinstance(other, FqMatrix):
            if other.field.q != q:
                raise FieldMismatchError("matrices over different fields")
            return FqMatrix(self.field, matmul_mod(self.entries, other.entries, q))
        vec = self.field.array(other)
        return matmul_mod(self.entries, vec, q)

    def __eq__(self, other):
        return (isinstance(other, FqMatrix) and self.field.q == other.field.q
                and self.shape == other.shape and bool(np.all(self.entries == other.entries)))


def matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """a @ b mod q without int64 overflow."""
    if a.dtype == object or b.dtype == object:
        return np.dot(a.astype(object), b.astype(object)) % q
    inner = a.shape[-1]
    # Accumulating `inner` products of size < q**2 must stay below 2**63.
    if inner == 0 or (q - 1) ** 2 * inner < 1 << 63:
        return (a @ b) % q
    bound = max(1, (1 << 63) // ((q - 1) ** 2))
    acc = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    for s in range(0, inner, bound):
        acc = (acc + (a[..., s:s + bound] @ b[s:s + bound]) % q) % q
    return acc


def rref(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivot choice is the first nonzero entry at or below the current row, so
    the result is fully deterministic.
    """
    a = np.array(a, dtype=a.dtype, copy=True) % q
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        inv = pow(int(a[r, c]), -1, q)
        if inv != 1:
            a[r] = a[r] * inv % q
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r]) % q) % q
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: FqMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m.entries, m.field.q)[1])


def right_kernel_basis(m: FqMatrix) -> list[np.ndarray]:
    """Basis of {v : m v = 0}, one vector per free column.

    Vector k has a 1 at the k-th free column, zeros at the other free
    columns, and the negated reduced entries at the pivot columns.
    """
    q = m.field.q
    cols = m.cols
    if m.rows == 0:
        reduced, pivots = np.zeros((0, cols), dtype=m.field.dtype), []
    else:
        reduced, pivots = rref(m.entries, q)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = np.zeros(cols, dtype=m.field.dtype)
        v[free] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-reduced[r, free]) % q
        basis.append(v)
    return basis


def row_space_rank(vectors, field: FieldParams) -> int:
    """Rank of a family of vectors."""
    vectors = list(vectors)
    if not vectors:
        return 0
    return rank(FqMatrix(field, np.vstack(vectors)))


class SingularMatrixError(ArithmeticError):
    pass


def solve(m: FqMatrix, rhs) -> np.ndarray:
    """Unique solution x of m x = rhs for square nonsingular m."""
    if m.rows != m.cols:
        raise ValueError(f"expected a square matrix, got {m.shape}")
    q = m.field.q
    b = m.field.array(rhs).reshape(m.rows, -1)
    reduced, pivots = rref(np.hstack([m.entries, b]), q)
    if pivots[:m.cols] != list(range(m.cols)):
        raise SingularMatrixError("matrix is singular")
    x = reduced[:m.rows, m.cols:]
    return x[:, 0].copy() if np.ndim(rhs) == 1 else x
