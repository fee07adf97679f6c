"""Sampled Gram matrix assembly and the symmetric Gauss-Seidel preconditioner.

The preconditioner approximately solves ``G e = r`` with ``G`` the Gram
matrix of the sampled rows: ``t`` forward sweeps with the lower triangle of
``G`` followed by ``t`` backward sweeps with the upper triangle, always
starting from ``e = 0``. Equal forward/backward sweep counts make the induced
map ``r -> e`` linear, symmetric and positive definite, which is exactly what
PCG requires of a preconditioner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import GramDegenerateError, ShapeMismatchError
from .matrix import CsrMatrix, gram_dense

__all__ = [
    "GramMatrix",
    "SgsPreconditioner",
    "assemble_gram",
    "build_preconditioner",
    "sgs_apply",
]

DEFAULT_SWEEPS = 5


@dataclass(frozen=True)
class GramMatrix:
    """Explicit n x n Gram matrix, stored in CSR with its full symmetric pattern."""

    n: int
    storage: CsrMatrix
    diag: np.ndarray


class SgsPreconditioner:
    """Callable ``e = P(r)``; immutable and safe for concurrent read-only use."""

    def __init__(self, gram: GramMatrix, sweeps: int = DEFAULT_SWEEPS):
        if sweeps < 1:
            raise ValueError(f"sweep count must be >= 1, got {sweeps}")
        self.gram = gram
        self.sweeps = int(sweeps)

    def apply(self, r: np.ndarray) -> np.ndarray:
        g = self.gram
        r = np.ascontiguousarray(r, dtype=np.float64)
        if r.shape != (g.n,):
            raise ShapeMismatchError(f"residual has shape {r.shape}, expected ({g.n},)")
        e = np.zeros(g.n)
        backends.active().sgs_sweeps(
            g.storage.indptr, g.storage.indices, g.storage.data,
            g.diag, r, e, self.sweeps,
        )
        return e

    __call__ = apply


def assemble_gram(A_s) -> GramMatrix:
    """Form A_s^T A_s explicitly and symmetrize it.

    The product is accumulated into a dense n x n buffer (n is small compared
    to the sample size throughout this package), averaged with its transpose
    to kill rounding asymmetry, then stored as CSR. A diagonal entry at or
    below 1e-14 means the sample never touched that column and raises
    :class:`GramDegenerateError` with the column index.
    """
    M = gram_dense(A_s)
    M = (M + M.T) / 2.0
    diag = np.ascontiguousarray(np.diag(M))
    bad = np.flatnonzero(diag <= 1e-14)
    if bad.size:
        j = int(bad[0])
        raise GramDegenerateError(j, float(diag[j]))
    storage = CsrMatrix.from_dense(M)
    return GramMatrix(n=M.shape[0], storage=storage, diag=diag)


def build_preconditioner(A_s, sweeps: int = DEFAULT_SWEEPS) -> SgsPreconditioner:
    """Assemble the Gram matrix once and wrap it with the sweep count."""
    return SgsPreconditioner(assemble_gram(A_s), sweeps)


def sgs_apply(P: SgsPreconditioner, r: np.ndarray) -> np.ndarray:
    """Functional form of ``P(r)``."""
    return P.apply(r)
