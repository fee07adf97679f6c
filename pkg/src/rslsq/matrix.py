"""Dense and CSR sparse matrices with the handful of operations the solver needs.

Dense matrices are plain 2-D float64 ``numpy.ndarray`` objects; sparse
matrices are :class:`CsrMatrix`. All operations here are pure functions and
both matrix kinds are safe to share across threads once constructed.
"""

from __future__ import annotations

import numpy as np

from . import backends
from .errors import InvalidMatrixError, ShapeMismatchError, ZeroColumnError

__all__ = [
    "CsrMatrix",
    "as_dense",
    "matvec",
    "transpose_matvec",
    "column_norms",
    "row_squared_norms",
    "normalize_columns",
    "frobenius_norm",
    "gram_dense",
    "densify",
    "shape_of",
    "nnz_of",
]


def _as_index_array(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int64)


def _as_value_array(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


class CsrMatrix:
    """Immutable sparse matrix in compressed sparse row format.

    Invariants (enforced at construction and checkable via :meth:`validate`):
    row offsets start at 0, are non-decreasing and end at nnz; column indices
    are strictly increasing within each row and smaller than ``cols``; values
    are finite; explicit zeros are dropped, so nnz counts structural nonzeros.
    """

    __slots__ = ("rows", "cols", "indptr", "indices", "data")

    def __init__(self, rows, cols, indptr, indices, data):
        rows = int(rows)
        cols = int(cols)
        indptr = _as_index_array(indptr)
        indices = _as_index_array(indices)
        data = _as_value_array(data)
        if indptr.shape[0] != rows + 1:
            raise InvalidMatrixError(
                f"row offsets have length {indptr.shape[0]}, expected {rows + 1}"
            )
        # Drop explicit zeros up front so nnz is structural.
        if data.size and np.any(data == 0.0):
            keep = data != 0.0
            counts = np.diff(indptr)
            row_ids = np.repeat(np.arange(rows, dtype=np.int64), counts)[keep]
            indices = indices[keep]
            data = data[keep]
            indptr = np.zeros(rows + 1, dtype=np.int64)
            np.cumsum(np.bincount(row_ids, minlength=rows), out=indptr[1:])
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "data", data)
        self.validate()
        for arr in (indptr, indices, data):
            arr.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("CsrMatrix is immutable")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def validate(self) -> None:
        """Raise :class:`InvalidMatrixError` if any CSR invariant is violated."""
        indptr, indices, data = self.indptr, self.indices, self.data
        if self.rows < 0 or self.cols < 0:
            raise InvalidMatrixError("negative dimensions")
        if indptr[0] != 0:
            raise InvalidMatrixError("row offsets must start at 0")
        if indptr[-1] != data.shape[0] or indices.shape[0] != data.shape[0]:
            raise InvalidMatrixError("row offsets end must equal nnz")
        if np.any(np.diff(indptr) < 0):
            raise InvalidMatrixError("row offsets must be non-decreasing")
        if data.size:
            if indices.min() < 0 or indices.max() >= self.cols:
                raise InvalidMatrixError("column index out of range")
            # Strictly increasing within each row: the only allowed descents
            # in the concatenated index array are at row boundaries.
            interior = np.ones(indices.shape[0] - 1, dtype=bool)
            boundary = indptr[1:-1]
            boundary = boundary[(boundary > 0) & (boundary < indices.shape[0])]
            interior[boundary - 1] = False
            if np.any((np.diff(indices) <= 0) & interior):
                raise InvalidMatrixError(
                    "column indices must be strictly increasing within a row"
                )
            if not np.all(np.isfinite(data)):
                raise InvalidMatrixError("values must be finite")
            if np.any(data == 0.0):
                raise InvalidMatrixError("explicit zeros are not stored")

    @classmethod
    def from_coo(cls, rows, cols, row_ids, col_ids, values) -> "CsrMatrix":
        """Build from coordinate triplets; duplicate coordinates are an error."""
        row_ids = _as_index_array(row_ids)
        col_ids = _as_index_array(col_ids)
        values = _as_value_array(values)
        if not (row_ids.shape == col_ids.shape == values.shape):
            raise InvalidMatrixError("coordinate arrays must have equal length")
        if values.size:
            if row_ids.min() < 0 or row_ids.max() >= rows:
                raise InvalidMatrixError("row index out of range")
            if col_ids.min() < 0 or col_ids.max() >= cols:
                raise InvalidMatrixError("column index out of range")
        order = np.lexsort((col_ids, row_ids))
        row_ids, col_ids, values = row_ids[order], col_ids[order], values[order]
        if values.size > 1:
            dup = (np.diff(row_ids) == 0) & (np.diff(col_ids) == 0)
            if np.any(dup):
                k = int(np.flatnonzero(dup)[0])
                raise InvalidMatrixError(
                    f"duplicate coordinate ({row_ids[k]}, {col_ids[k]})"
                )
        indptr = np.zeros(rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(row_ids, minlength=rows), out=indptr[1:])
        return cls(rows, cols, indptr, col_ids, values)

    @classmethod
    def from_dense(cls, arr) -> "CsrMatrix":
        arr = as_dense(arr)
        row_ids, col_ids = np.nonzero(arr)
        return cls.from_coo(arr.shape[0], arr.shape[1], row_ids, col_ids, arr[row_ids, col_ids])

    @classmethod
    def identity(cls, n: int) -> "CsrMatrix":
        idx = np.arange(n, dtype=np.int64)
        return cls(n, n, np.arange(n + 1, dtype=np.int64), idx, np.ones(n))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        counts = np.diff(self.indptr)
        row_ids = np.repeat(np.arange(self.rows, dtype=np.int64), counts)
        out[row_ids, self.indices] = self.data
        return out

    def __repr__(self) -> str:
        return f"<CsrMatrix {self.rows}x{self.cols}, nnz={self.nnz}>"


def as_dense(A) -> np.ndarray:
    """Validate and return A as a 2-D float64 array with finite entries."""
    arr = np.ascontiguousarray(A, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidMatrixError(f"dense matrix must be 2-D, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrixError("dense matrix entries must be finite")
    return arr


def _as_vector(x, length: int, what: str) -> np.ndarray:
    v = np.ascontiguousarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != length:
        raise ShapeMismatchError(
            f"{what} has shape {np.shape(x)}, expected ({length},)"
        )
    return v


def shape_of(A) -> tuple[int, int]:
    if isinstance(A, CsrMatrix):
        return A.shape
    return as_dense(A).shape


def nnz_of(A) -> int:
    """Structural nonzero count (dense matrices count nonzero entries)."""
    if isinstance(A, CsrMatrix):
        return A.nnz
    return int(np.count_nonzero(as_dense(A)))


def densify(A) -> np.ndarray:
    return A.to_dense() if isinstance(A, CsrMatrix) else as_dense(A)


def matvec(A, x) -> np.ndarray:
    """Return A x."""
    if isinstance(A, CsrMatrix):
        x = _as_vector(x, A.cols, "x")
        out = np.empty(A.rows)
        backends.active().csr_matvec(A.indptr, A.indices, A.data, x, out)
        return out
    A = as_dense(A)
    x = _as_vector(x, A.shape[1], "x")
    return A @ x


def transpose_matvec(A, y) -> np.ndarray:
    """Return A^T y without materializing A^T."""
    if isinstance(A, CsrMatrix):
        y = _as_vector(y, A.rows, "y")
        out = np.empty(A.cols)
        backends.active().csr_rmatvec(A.indptr, A.indices, A.data, y, out)
        return out
    A = as_dense(A)
    y = _as_vector(y, A.shape[0], "y")
    return A.T @ y


def column_norms(A) -> np.ndarray:
    """Euclidean norm of each column."""
    if isinstance(A, CsrMatrix):
        sq = np.bincount(A.indices, weights=A.data * A.data, minlength=A.cols)
        return np.sqrt(sq)
    return np.sqrt(np.sum(as_dense(A) ** 2, axis=0))


def row_squared_norms(A) -> np.ndarray:
    """Squared Euclidean norm of each row; entries sum to the squared Frobenius norm."""
    if isinstance(A, CsrMatrix):
        counts = np.diff(A.indptr)
        row_ids = np.repeat(np.arange(A.rows, dtype=np.int64), counts)
        return np.bincount(row_ids, weights=A.data * A.data, minlength=A.rows)
    return np.sum(as_dense(A) ** 2, axis=1)


def frobenius_norm(A) -> float:
    if isinstance(A, CsrMatrix):
        return float(np.sqrt(np.sum(A.data * A.data)))
    return float(np.sqrt(np.sum(as_dense(A) ** 2)))


def normalize_columns(A):
    """Scale each column to unit Euclidean norm.

    Returns ``(scaled, d)`` where ``d[j]`` is the original norm of column j,
    so ``scaled = A diag(d)^-1``. A zero column raises :class:`ZeroColumnError`
    naming its index.
    """
    d = column_norms(A)
    zero = np.flatnonzero(d == 0.0)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    if isinstance(A, CsrMatrix):
        scaled = CsrMatrix(
            A.rows, A.cols, A.indptr, A.indices, A.data / d[A.indices]
        )
        return scaled, d
    return as_dense(A) / d, d


def gram_dense(A) -> np.ndarray:
    """Dense A^T A (n x n). Intended for the moderate n this package targets."""
    if isinstance(A, CsrMatrix):
        out = np.zeros((A.cols, A.cols))
        backends.active().csr_gram_dense(A.indptr, A.indices, A.data, out)
        return out
    A = as_dense(A)
    return A.T @ A
