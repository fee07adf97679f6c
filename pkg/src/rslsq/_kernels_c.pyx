# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: CSR products, Gauss-Seidel sweeps, Gram accumulation.

Mirrors the signatures of `_kernels_py`; `backends` picks one at import time.
"""

import numpy as np

ctypedef long long idx_t
ctypedef double f64_t


def csr_matvec(const idx_t[::1] indptr, const idx_t[::1] indices,
               const f64_t[::1] data, const f64_t[::1] x, f64_t[::1] out):
    """out[i] = sum_k A[i, k] * x[k], summed in stored column order."""
    cdef Py_ssize_t nrows = indptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef f64_t acc
    for i in range(nrows):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc


def csr_rmatvec(const idx_t[::1] indptr, const idx_t[::1] indices,
                const f64_t[::1] data, const f64_t[::1] y, f64_t[::1] out):
    """out = A^T y accumulated row by row (A^T is never materialized)."""
    cdef Py_ssize_t nrows = indptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef f64_t yi
    out[:] = 0.0
    for i in range(nrows):
        yi = y[i]
        if yi != 0.0:
            for k in range(indptr[i], indptr[i + 1]):
                out[indices[k]] += data[k] * yi


def sgs_sweeps(const idx_t[::1] indptr, const idx_t[::1] indices,
               const f64_t[::1] data, const f64_t[::1] diag,
               const f64_t[::1] r, f64_t[::1] e, Py_ssize_t sweeps):
    """In-place symmetric Gauss-Seidel on G e = r.

    Runs `sweeps` forward sweeps (ascending rows) followed by `sweeps`
    backward sweeps (descending rows). G is given in CSR with its full
    symmetric pattern; `diag` holds the diagonal entries.
    """
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t s, i, k
    cdef f64_t acc
    for s in range(sweeps):
        for i in range(n):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * e[indices[k]]
            e[i] += (r[i] - acc) / diag[i]
    for s in range(sweeps):
        for i in range(n - 1, -1, -1):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * e[indices[k]]
            e[i] += (r[i] - acc) / diag[i]


def csr_gram_dense(const idx_t[::1] indptr, const idx_t[::1] indices,
                   const f64_t[::1] data, f64_t[:, ::1] out):
    """Accumulate A^T A into the dense buffer `out` (n x n, pre-zeroed)."""
    cdef Py_ssize_t nrows = indptr.shape[0] - 1
    cdef Py_ssize_t t, k1, k2
    cdef f64_t v
    cdef idx_t j
    for t in range(nrows):
        for k1 in range(indptr[t], indptr[t + 1]):
            v = data[k1]
            j = indices[k1]
            for k2 in range(indptr[t], indptr[t + 1]):
                out[j, indices[k2]] += v * data[k2]
