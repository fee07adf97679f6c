"""Pure numpy fallback for the compiled kernels in `_kernels_c`.

The CSR products are vectorized with `bincount`; the Gauss-Seidel sweeps are
sequential by nature and fall back to a per-row Python loop, which is the
main thing the compiled backend speeds up.
"""

import numpy as np


def _row_ids(indptr):
    nrows = indptr.shape[0] - 1
    return np.repeat(np.arange(nrows, dtype=np.int64), np.diff(indptr))


def csr_matvec(indptr, indices, data, x, out):
    nrows = indptr.shape[0] - 1
    contrib = data * x[indices]
    out[:] = np.bincount(_row_ids(indptr), weights=contrib, minlength=nrows)


def csr_rmatvec(indptr, indices, data, y, out):
    contrib = data * y[_row_ids(indptr)]
    out[:] = np.bincount(indices, weights=contrib, minlength=out.shape[0])


def sgs_sweeps(indptr, indices, data, diag, r, e, sweeps):
    n = diag.shape[0]
    for _ in range(sweeps):
        for i in range(n):
            lo, hi = indptr[i], indptr[i + 1]
            acc = np.dot(data[lo:hi], e[indices[lo:hi]])
            e[i] += (r[i] - acc) / diag[i]
    for _ in range(sweeps):
        for i in range(n - 1, -1, -1):
            lo, hi = indptr[i], indptr[i + 1]
            acc = np.dot(data[lo:hi], e[indices[lo:hi]])
            e[i] += (r[i] - acc) / diag[i]


def csr_gram_dense(indptr, indices, data, out):
    nrows = indptr.shape[0] - 1
    for t in range(nrows):
        lo, hi = indptr[t], indptr[t + 1]
        cols = indices[lo:hi]
        vals = data[lo:hi]
        out[cols[:, None], cols] += vals[:, None] * vals
