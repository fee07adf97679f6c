"""Conjugate gradient on the normal equation, with and without preconditioning,
plus the end-to-end row-sampling driver and a small dense direct oracle.

Solvers work matrix-free: each iteration costs one ``A p`` and one
``A^T (A p)``; the n x n normal matrix is never formed. The stopping rule is
the relative normal-equation residual ``||A^T b - A^T A x|| / ||A^T b||``,
tracked through the CG recurrence and re-verified once from scratch at
termination. Non-convergence within the iteration budget is reported, not
raised.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BreakdownError, GramDegenerateError, RankDeficientError
from .matrix import (
    as_dense,
    matvec,
    normalize_columns,
    shape_of,
    transpose_matvec,
)
from .precond import build_preconditioner
from .sampling import apply_sample, default_sample_size, draw_sample_plan, row_sampling_density

__all__ = [
    "SolverConfig",
    "SolveReport",
    "cg_normal",
    "pcg_normal",
    "lsq_solve_rs",
    "lsq_solve_cg",
    "dense_lsq_oracle",
]


@dataclass(frozen=True)
class SolverConfig:
    """Solver knobs. ``max_iter=None`` resolves to 5n at solve time."""

    tol: float = 1e-7
    max_iter: int | None = None
    sgs_sweeps: int = 5
    sample_factor: float = 4.0
    seed: int = 0
    retries_on_degenerate_sample: int = 3

    def __post_init__(self):
        if not (0.0 < self.tol < 1.0):
            raise ValueError(f"tol must be in (0, 1), got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.sgs_sweeps < 1:
            raise ValueError(f"sgs_sweeps must be >= 1, got {self.sgs_sweeps}")
        if self.sample_factor <= 0:
            raise ValueError(f"sample_factor must be positive, got {self.sample_factor}")

    def resolve_max_iter(self, n: int) -> int:
        return self.max_iter if self.max_iter is not None else 5 * n


@dataclass
class SolveReport:
    """One solve: iteration count, residual history and timing split.

    ``residual_history`` starts at 1 for a nonzero right-hand side and gains
    one entry per iteration; ``final_relres`` is recomputed from scratch at
    the end rather than taken from the recurrence. ``sample_size`` is 0 for
    plain CG.
    """

    iterations: int
    converged: bool
    residual_history: list[float] = field(repr=False)
    final_relres: float
    setup_seconds: float
    solve_seconds: float
    sample_size: int = 0

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "final_relres": self.final_relres,
            "setup_seconds": self.setup_seconds,
            "solve_seconds": self.solve_seconds,
            "sample_size": self.sample_size,
            "residual_history": list(self.residual_history),
        }


def _as_rhs(b, m: int) -> np.ndarray:
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.shape != (m,):
        raise ValueError(f"rhs has shape {b.shape}, expected ({m},)")
    if not np.all(np.isfinite(b)):
        raise ValueError("rhs entries must be finite")
    return b


def _final_relres(A, b, x, gnorm: float) -> float:
    r_true = transpose_matvec(A, b - matvec(A, x))
    return float(np.linalg.norm(r_true)) / gnorm


def cg_normal(A, b, cfg: SolverConfig = SolverConfig()):
    """CG on ``A^T A x = A^T b`` starting from x = 0.

    Returns ``(x, report)``. If ``A^T b = 0`` the exact least-squares solution
    x = 0 is returned immediately.
    """
    m, n = shape_of(A)
    b = _as_rhs(b, m)
    g = transpose_matvec(A, b)
    gnorm = float(np.linalg.norm(g))
    t0 = time.perf_counter()
    if gnorm == 0.0:
        return np.zeros(n), SolveReport(
            iterations=0, converged=True, residual_history=[0.0],
            final_relres=0.0, setup_seconds=0.0,
            solve_seconds=time.perf_counter() - t0,
        )
    max_iter = cfg.resolve_max_iter(n)
    x = np.zeros(n)
    r = g.copy()
    p = r.copy()
    rho = float(r @ r)
    history = [1.0]
    iterations = 0
    for it in range(1, max_iter + 1):
        w = matvec(A, p)
        denom = float(w @ w)
        if denom <= 0.0:
            raise BreakdownError("p^T A^T A p is not positive", it)
        q = transpose_matvec(A, w)
        alpha = rho / denom
        x += alpha * p
        r -= alpha * q
        rho_new = float(r @ r)
        relres = math.sqrt(rho_new) / gnorm
        history.append(relres)
        iterations = it
        if relres <= cfg.tol:
            break
        p = r + (rho_new / rho) * p
        rho = rho_new
    final = _final_relres(A, b, x, gnorm)
    return x, SolveReport(
        iterations=iterations,
        converged=final <= cfg.tol,
        residual_history=history,
        final_relres=final,
        setup_seconds=0.0,
        solve_seconds=time.perf_counter() - t0,
    )


def pcg_normal(A, b, precond, cfg: SolverConfig = SolverConfig()):
    """Preconditioned CG on the normal equation; ``precond`` maps r to e.

    The preconditioner must be a fixed linear, symmetric, positive definite
    operator (on the range of A^T A for consistent singular systems).
    """
    m, n = shape_of(A)
    b = _as_rhs(b, m)
    g = transpose_matvec(A, b)
    gnorm = float(np.linalg.norm(g))
    t0 = time.perf_counter()
    if gnorm == 0.0:
        return np.zeros(n), SolveReport(
            iterations=0, converged=True, residual_history=[0.0],
            final_relres=0.0, setup_seconds=0.0,
            solve_seconds=time.perf_counter() - t0,
        )
    max_iter = cfg.resolve_max_iter(n)
    x = np.zeros(n)
    r = g.copy()
    e = precond(r)
    p = e.copy()
    rho = float(r @ e)
    history = [1.0]
    iterations = 0
    for it in range(1, max_iter + 1):
        if rho <= 0.0:
            raise BreakdownError("(r, P r) is not positive", it)
        w = matvec(A, p)
        denom = float(w @ w)
        if denom <= 0.0:
            raise BreakdownError("p^T A^T A p is not positive", it)
        q = transpose_matvec(A, w)
        alpha = rho / denom
        x += alpha * p
        r -= alpha * q
        relres = float(np.linalg.norm(r)) / gnorm
        history.append(relres)
        iterations = it
        if relres <= cfg.tol:
            break
        e = precond(r)
        rho_new = float(r @ e)
        p = e + (rho_new / rho) * p
        rho = rho_new
    final = _final_relres(A, b, x, gnorm)
    return x, SolveReport(
        iterations=iterations,
        converged=final <= cfg.tol,
        residual_history=history,
        final_relres=final,
        setup_seconds=0.0,
        solve_seconds=time.perf_counter() - t0,
    )


def lsq_solve_rs(A, b, cfg: SolverConfig = SolverConfig()):
    """Row-sampling preconditioned least squares solve.

    Steps: normalize columns; sample ``ceil(sample_factor * n * ln n)`` rows
    of the normalized matrix by squared row norm; build the symmetric
    Gauss-Seidel preconditioner from the sampled Gram matrix; run PCG; map
    the solution back through the column scaling. Setup time covers the first
    three steps, solve time the PCG loop. A degenerate sample (a column the
    plan missed) is redrawn with a fresh seed up to
    ``cfg.retries_on_degenerate_sample`` times.
    """
    m, n = shape_of(A)
    if m < n:
        raise ValueError(f"matrix must be overdetermined, got {m} x {n}")
    t0 = time.perf_counter()
    scaled, d = normalize_columns(A)
    density = row_sampling_density(scaled)
    # With replacement s may exceed m; cap only at the generous 16 m.
    s = min(default_sample_size(n, cfg.sample_factor), 16 * m)
    precond = None
    for attempt in range(cfg.retries_on_degenerate_sample + 1):
        plan = draw_sample_plan(density, s, cfg.seed + attempt)
        sampled = apply_sample(scaled, plan)
        try:
            precond = build_preconditioner(sampled, cfg.sgs_sweeps)
            break
        except GramDegenerateError:
            if attempt == cfg.retries_on_degenerate_sample:
                raise
    setup = time.perf_counter() - t0
    x_scaled, report = pcg_normal(scaled, b, precond, cfg)
    report = replace(report, setup_seconds=setup, sample_size=s)
    return x_scaled / d, report


def lsq_solve_cg(A, b, cfg: SolverConfig = SolverConfig()):
    """Baseline: CG on the column-normalized system (equivalently, PCG on the
    original system with a diagonal preconditioner). Same unscaling and
    timing split as :func:`lsq_solve_rs` so reports are comparable."""
    t0 = time.perf_counter()
    scaled, d = normalize_columns(A)
    setup = time.perf_counter() - t0
    x_scaled, report = cg_normal(scaled, b, cfg)
    report = replace(report, setup_seconds=setup)
    return x_scaled / d, report


def dense_lsq_oracle(A, b) -> np.ndarray:
    """Direct normal-equation solve by Cholesky; reference truth for tests.

    Limited to n <= 2000. A pivot at or below ``1e-12 * max diagonal`` raises
    :class:`RankDeficientError`.
    """
    A = as_dense(A)
    m, n = A.shape
    if n > 2000:
        raise ValueError(f"oracle limited to 2000 columns, got {n}")
    b = _as_rhs(b, m)
    G = A.T @ A
    g = A.T @ b
    L = _cholesky_spd(G)
    y = _forward_solve(L, g)
    return _backward_solve(L, y)


def _cholesky_spd(G: np.ndarray) -> np.ndarray:
    n = G.shape[0]
    L = np.zeros_like(G)
    guard = 1e-12 * float(np.max(np.diag(G)))
    for j in range(n):
        pivot = G[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= guard:
            raise RankDeficientError(f"rank deficient (pivot {pivot:.3e} at column {j})")
        L[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            L[j + 1 :, j] = (G[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def _forward_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    y = np.zeros(n)
    for i in range(n):
        y[i] = (rhs[i] - L[i, :i] @ y[:i]) / L[i, i]
    return y


def _backward_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (rhs[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x
