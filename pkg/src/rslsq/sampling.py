"""Row sampling: squared-row-norm density, i.i.d. draws, scaled sampled matrix.

Rows are drawn with replacement with probability proportional to their
squared Euclidean norm; sampled row t is the source row scaled by
``1 / sqrt(s * p)``, which makes the sampled Gram matrix an unbiased
estimator of the full one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .matrix import CsrMatrix, as_dense, row_squared_norms

__all__ = [
    "SamplingDensity",
    "SamplePlan",
    "row_sampling_density",
    "uniform_density",
    "default_sample_size",
    "draw_sample_plan",
    "apply_sample",
]

# Probabilities below this would overflow the 1/sqrt(s p) weights.
_MIN_PROB = 1e-300


@dataclass(frozen=True)
class SamplingDensity:
    """Probability mass over the rows of a matrix; zero rows get probability 0."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("density must be a nonempty 1-D array")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
        p = p.copy()
        p[p < _MIN_PROB] = 0.0
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class SamplePlan:
    """Drawn row indices and the matching scaling weights."""

    sample_size: int
    indices: np.ndarray
    weights: np.ndarray
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": int(self.seed),
                "sample_size": int(self.sample_size),
                "indices": [int(i) for i in self.indices],
                "weights": [float(w) for w in self.weights],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SamplePlan":
        obj = json.loads(text)
        return cls(
            sample_size=int(obj["sample_size"]),
            indices=np.asarray(obj["indices"], dtype=np.int64),
            weights=np.asarray(obj["weights"], dtype=np.float64),
            seed=int(obj["seed"]),
        )


def row_sampling_density(A) -> SamplingDensity:
    """Density with p_k proportional to the squared norm of row k."""
    sq = row_squared_norms(A)
    total = sq.sum()
    if total == 0.0:
        raise ValueError("cannot build a sampling density for an all-zero matrix")
    return SamplingDensity(sq / total)


def uniform_density(m: int) -> SamplingDensity:
    """Uniform density over m rows. For tests and failure demonstrations only;
    the solver never uses it."""
    return SamplingDensity(np.full(m, 1.0 / m))


def default_sample_size(n: int, factor: float = 4.0) -> int:
    """ceil(factor * n * ln n), the sample size the solver defaults to."""
    if n < 2:
        raise ValueError(f"need at least 2 columns, got {n}")
    return math.ceil(factor * n * math.log(n))


def draw_sample_plan(density: SamplingDensity, s: int, seed: int) -> SamplePlan:
    """Draw s row indices i.i.d. with replacement; deterministic for a seed.

    Inverse-CDF sampling over the rows with positive probability, so rows
    with probability zero can never appear.
    """
    if s < 1:
        raise ValueError(f"sample size must be >= 1, got {s}")
    probs = density.probs
    positive = np.flatnonzero(probs > 0.0)
    cum = np.cumsum(probs[positive])
    rng = np.random.default_rng(seed)
    u = rng.random(s) * cum[-1]
    loc = np.searchsorted(cum, u, side="right")
    np.clip(loc, 0, positive.size - 1, out=loc)
    indices = positive[loc]
    weights = 1.0 / np.sqrt(s * probs[indices])
    return SamplePlan(sample_size=s, indices=indices, weights=weights, seed=int(seed))


def apply_sample(A, plan: SamplePlan):
    """Return the s x n sampled matrix whose row t is weights[t] * A[indices[t]].

    Sparse input yields sparse output; duplicate draws stay distinct rows.
    """
    idx = plan.indices
    if isinstance(A, CsrMatrix):
        if idx.size and (idx.min() < 0 or idx.max() >= A.rows):
            raise IndexError("sample plan index out of range")
        starts = A.indptr[idx]
        counts = A.indptr[idx + 1] - starts
        out_indptr = np.zeros(idx.size + 1, dtype=np.int64)
        np.cumsum(counts, out=out_indptr[1:])
        total = int(out_indptr[-1])
        # Gather source slices: position k in output maps into A.data at
        # starts[row(k)] + (k - out_indptr[row(k)]).
        row_ids = np.repeat(np.arange(idx.size, dtype=np.int64), counts)
        gather = starts[row_ids] + (np.arange(total, dtype=np.int64) - out_indptr[row_ids])
        data = A.data[gather] * plan.weights[row_ids]
        return CsrMatrix(idx.size, A.cols, out_indptr, A.indices[gather], data)
    A = as_dense(A)
    if idx.size and (idx.min() < 0 or idx.max() >= A.shape[0]):
        raise IndexError("sample plan index out of range")
    return A[idx] * plan.weights[:, None]
