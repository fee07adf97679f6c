"""Spectral diagnostics and empirical verification of the sampling theory:
condition and coherence numbers, Gram concentration trials, high-frequency
Rayleigh-quotient bounds, and thresholded Gram edge-list export.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import RankDeficientError
from .matrix import CsrMatrix, as_dense, densify, gram_dense, matvec, shape_of, transpose_matvec
from .sampling import apply_sample, draw_sample_plan, row_sampling_density
from .solvers import _cholesky_spd

__all__ = [
    "SpectralSummary",
    "ConcentrationReport",
    "HighFrequencyReport",
    "FilteredGramReport",
    "spectral_summary",
    "concentration_test",
    "high_frequency_test",
    "filtered_gram_export",
]

_DENSE_EIG_LIMIT = 2000
_CHUNK = 8192


@dataclass(frozen=True)
class SpectralSummary:
    """Extreme eigenvalues of A^T A, the induced condition number, and coherence.

    ``kappa_normal`` is lambda_max over the smallest eigenvalue above
    ``rank_tolerance`` (the effective condition number for singular
    matrices). ``coherence`` is None for rank-deficient input. ``approximate``
    marks the Lanczos estimate used beyond the dense-eigensolve size limit.
    """

    lambda_max: float
    lambda_min_nonzero: float
    rank_tolerance: float
    kappa_normal: float
    coherence: float | None
    approximate: bool = False

    def to_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "lambda_min_nonzero": self.lambda_min_nonzero,
            "rank_tolerance": self.rank_tolerance,
            "kappa_normal": self.kappa_normal,
            "coherence": self.coherence,
            "approximate": self.approximate,
        }


@dataclass
class ConcentrationReport:
    """Outcome of repeated sampled-Gram deviation trials."""

    trials: int
    epsilon: float
    successes: int
    norms: list[float]
    sampled_lambda_min: list[float]
    sampled_lambda_max: list[float]
    true_lambda_min: float
    true_lambda_max: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "epsilon": self.epsilon,
            "successes": self.successes,
            "norms": self.norms,
            "sampled_lambda_min": self.sampled_lambda_min,
            "sampled_lambda_max": self.sampled_lambda_max,
            "true_lambda_min": self.true_lambda_min,
            "true_lambda_max": self.true_lambda_max,
        }


@dataclass
class HighFrequencyReport:
    """Rayleigh-quotient bound checks on the high-frequency eigenvectors."""

    trials: int
    c_h_proxy: float
    n_high: int
    violations: int
    epsilons: list[float]
    top_relative_deviation: float
    low_relative_deviation: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "c_h_proxy": self.c_h_proxy,
            "n_high": self.n_high,
            "violations": self.violations,
            "epsilons": self.epsilons,
            "top_relative_deviation": self.top_relative_deviation,
            "low_relative_deviation": self.low_relative_deviation,
        }


@dataclass
class FilteredGramReport:
    """Thresholded edge sets of the full and sampled Gram matrices."""

    theta: float
    edges_full: int
    edges_sampled: int
    jaccard: float
    full_path: str
    sampled_path: str

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "edges_full": self.edges_full,
            "edges_sampled": self.edges_sampled,
            "jaccard": self.jaccard,
            "full_path": self.full_path,
            "sampled_path": self.sampled_path,
        }


def _sym_spectral_norm(M: np.ndarray) -> float:
    ev = np.linalg.eigvalsh(M)
    return float(max(abs(ev[0]), abs(ev[-1])))


def _coherence(A, G: np.ndarray) -> float | None:
    """max_i ||u_i||^2 with U = A R^-1 from the Cholesky factor of A^T A.

    Returns None when A^T A is numerically rank deficient. Row norms are
    computed in chunks so sparse inputs never densify wholesale.
    """
    try:
        L = _cholesky_spd(G)
    except RankDeficientError:
        return None
    m, _ = shape_of(A)
    best = 0.0
    for lo in range(0, m, _CHUNK):
        hi = min(lo + _CHUNK, m)
        if isinstance(A, CsrMatrix):
            block = CsrMatrix(
                hi - lo, A.cols,
                A.indptr[lo : hi + 1] - A.indptr[lo],
                A.indices[A.indptr[lo] : A.indptr[hi]],
                A.data[A.indptr[lo] : A.indptr[hi]],
            ).to_dense()
        else:
            block = as_dense(A)[lo:hi]
        # u_i = a_i L^-T, so U^T = L^-1 block^T.
        Ut = scipy.linalg.solve_triangular(L, block.T, lower=True)
        best = max(best, float(np.max(np.sum(Ut * Ut, axis=0))))
    return best


def _lanczos_extremes(A, steps: int = 100, seed: int = 0) -> tuple[float, float]:
    """Lanczos estimate of the extreme eigenvalues of A^T A (matrix-free)."""
    _, n = shape_of(A)
    steps = min(steps, n)
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    basis = [q]
    alphas, betas = [], []
    for _ in range(steps):
        v = transpose_matvec(A, matvec(A, basis[-1]))
        alphas.append(float(basis[-1] @ v))
        v -= alphas[-1] * basis[-1]
        if len(basis) > 1:
            v -= betas[-1] * basis[-2]
        for u in basis:  # full reorthogonalization; basis stays small
            v -= (u @ v) * u
        beta = float(np.linalg.norm(v))
        if beta < 1e-14:
            break
        betas.append(beta)
        basis.append(v / beta)
    T = np.diag(alphas)
    if betas:
        k = len(alphas)
        T += np.diag(betas[: k - 1], 1) + np.diag(betas[: k - 1], -1)
    ritz = np.linalg.eigvalsh(T)
    return float(ritz[-1]), float(ritz[0])


def spectral_summary(A) -> SpectralSummary:
    """Condition number of A^T A and the coherence of A.

    Uses a dense symmetric eigensolve up to 2000 columns; beyond that a
    Lanczos estimate is returned with ``approximate=True`` and no coherence.
    """
    m, n = shape_of(A)
    if n > _DENSE_EIG_LIMIT:
        lmax, lmin = _lanczos_extremes(A)
        rank_tol = n * lmax * 1e-12
        lmin = max(lmin, rank_tol)
        return SpectralSummary(
            lambda_max=lmax, lambda_min_nonzero=lmin, rank_tolerance=rank_tol,
            kappa_normal=lmax / lmin, coherence=None, approximate=True,
        )
    G = gram_dense(A)
    evals = np.linalg.eigvalsh(G)
    lmax = float(evals[-1])
    if lmax <= 0.0:
        raise ValueError("A^T A has no positive eigenvalues (zero matrix?)")
    rank_tol = n * lmax * 1e-12
    above = evals[evals > rank_tol]
    lmin = float(above[0])
    return SpectralSummary(
        lambda_max=lmax,
        lambda_min_nonzero=lmin,
        rank_tolerance=rank_tol,
        kappa_normal=lmax / lmin,
        coherence=_coherence(A, G),
        approximate=False,
    )


def concentration_test(A, s: int, epsilon: float, trials: int, seed: int) -> ConcentrationReport:
    """Draw independent sample plans and measure ||A_s^T A_s - A^T A||.

    A is expected column-normalized. Each trial uses seed + trial index, so
    results are reproducible and order-independent. Counts the trials whose
    spectral deviation is at most epsilon, and records the sampled extreme
    eigenvalues for the spectrum-sandwich check.
    """
    _, n = shape_of(A)
    if n > 500:
        raise ValueError(f"concentration test limited to 500 columns, got {n}")
    G = gram_dense(A)
    true_ev = np.linalg.eigvalsh(G)
    density = row_sampling_density(A)
    norms, smins, smaxs = [], [], []
    for t in range(trials):
        plan = draw_sample_plan(density, s, seed + t)
        Gs = gram_dense(apply_sample(A, plan))
        norms.append(_sym_spectral_norm(Gs - G))
        ev = np.linalg.eigvalsh(Gs)
        smins.append(float(ev[0]))
        smaxs.append(float(ev[-1]))
    successes = int(sum(1 for v in norms if v <= epsilon))
    return ConcentrationReport(
        trials=trials, epsilon=epsilon, successes=successes, norms=norms,
        sampled_lambda_min=smins, sampled_lambda_max=smaxs,
        true_lambda_min=float(true_ev[0]), true_lambda_max=float(true_ev[-1]),
    )


def high_frequency_test(A, s: int, c_h_proxy: float, trials: int, seed: int) -> HighFrequencyReport:
    """Check the sampled Rayleigh quotients of high-frequency eigenvectors.

    High-frequency vectors are the eigenvectors of A^T A with eigenvalue at
    least lambda_max / c_h_proxy. For each trial the observed deviation norm
    eps gives the band (1 +- c_h_proxy * eps) that the sampled quotient must
    fall in; violations are counted. Also reports the mean relative quotient
    deviation of the top eigenvector against the bottom one, the contrast
    that makes the sampled Gram a high-frequency smoother.
    """
    _, n = shape_of(A)
    if n > 500:
        raise ValueError(f"high-frequency test limited to 500 columns, got {n}")
    G = gram_dense(A)
    evals, evecs = np.linalg.eigh(G)
    lmax = float(evals[-1])
    high = evecs[:, evals >= lmax / c_h_proxy]
    qtrue = np.array([float(x @ G @ x) for x in high.T])
    density = row_sampling_density(A)
    violations = 0
    epsilons = []
    top_dev, low_dev = [], []
    x_top = evecs[:, -1]
    x_low = evecs[:, 0]
    for t in range(trials):
        plan = draw_sample_plan(density, s, seed + t)
        Gs = gram_dense(apply_sample(A, plan))
        eps = _sym_spectral_norm(Gs - G)
        epsilons.append(eps)
        qs = np.array([float(x @ Gs @ x) for x in high.T])
        lo = (1.0 - c_h_proxy * eps) * qtrue
        hi = (1.0 + c_h_proxy * eps) * qtrue
        violations += int(np.sum((qs < lo) | (qs > hi)))
        top_dev.append(abs(float(x_top @ Gs @ x_top) / float(x_top @ G @ x_top) - 1.0))
        low_dev.append(abs(float(x_low @ Gs @ x_low) / float(x_low @ G @ x_low) - 1.0))
    return HighFrequencyReport(
        trials=trials, c_h_proxy=c_h_proxy, n_high=high.shape[1],
        violations=violations, epsilons=epsilons,
        top_relative_deviation=float(np.mean(top_dev)),
        low_relative_deviation=float(np.mean(low_dev)),
    )


def _threshold_edges(G: np.ndarray, theta: float) -> dict[tuple[int, int], float]:
    src, dst = np.nonzero(np.triu(np.abs(G) >= theta, k=1))
    return {(int(i), int(j)): float(G[i, j]) for i, j in zip(src, dst)}


def filtered_gram_export(A, A_s, theta: float, prefix: str) -> FilteredGramReport:
    """Write thresholded edge lists of A^T A and A_s^T A_s as TSV files.

    Keeps strictly-upper entries with |value| >= theta (0-based indices, one
    ``i <TAB> j <TAB> value`` line each) to ``<prefix>_full.tsv`` and
    ``<prefix>_sampled.tsv``, and reports the Jaccard similarity of the two
    index sets (1.0 when both are empty).
    """
    G = gram_dense(A)
    Gs = gram_dense(A_s)
    full = _threshold_edges(G, theta)
    sampled = _threshold_edges(Gs, theta)
    full_path = f"{prefix}_full.tsv"
    sampled_path = f"{prefix}_sampled.tsv"
    for path, edges in ((full_path, full), (sampled_path, sampled)):
        with open(path, "w") as fh:
            for (i, j), v in sorted(edges.items()):
                fh.write(f"{i}\t{j}\t{v:.17g}\n")
    union = set(full) | set(sampled)
    inter = set(full) & set(sampled)
    jaccard = 1.0 if not union else len(inter) / len(union)
    return FilteredGramReport(
        theta=theta, edges_full=len(full), edges_sampled=len(sampled),
        jaccard=jaccard, full_path=full_path, sampled_path=sampled_path,
    )
