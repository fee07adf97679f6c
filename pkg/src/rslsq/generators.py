"""Test-matrix generators: Gaussian, semi-Gaussian, sparse random with
controlled condition number, UDV, and power-law random-graph incidence
matrices with gluing.

Every generator is a pure function of its parameters and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix import CsrMatrix, matvec, shape_of

__all__ = [
    "GraphModel",
    "gen_gaussian",
    "gen_semi_gaussian",
    "gen_sprand",
    "gen_udv",
    "gen_powerlaw_graph",
    "build_incidence_from_square",
    "glue_graphs",
    "filter_isolated",
    "gen_graph_laplacian",
    "consistent_rhs",
]

GLUE_OVERLAP = 5


@dataclass(frozen=True)
class GraphModel:
    """A random graph with power-law expected degrees.

    ``incidence`` is the edge-by-vertex matrix of the model's own edges, one
    row per edge with +1 at the lower-index endpoint and -1 at the other, so
    ``B^T B`` equals the graph Laplacian (degree matrix minus adjacency).
    """

    n: int
    beta: float
    d: float
    i0: int
    max_expected_degree: float
    weights: np.ndarray
    adjacency: CsrMatrix
    incidence: CsrMatrix


def gen_gaussian(m: int, n: int, seed: int) -> np.ndarray:
    """Dense matrix of i.i.d. standard normal entries."""
    if not (m > n >= 2):
        raise ValueError(f"need m > n >= 2, got {m} x {n}")
    return np.random.default_rng(seed).standard_normal((m, n))


def gen_semi_gaussian(m: int, n: int, seed: int) -> CsrMatrix:
    """Block-diagonal [[G, 0], [0, I]] with G Gaussian of size (m - n/2) x (n/2).

    The identity block pins the coherence at exactly 1, the case where
    uniform row sampling fails. Stored sparse.
    """
    if n % 2 != 0:
        raise ValueError(f"column count must be even, got {n}")
    if not (m > n >= 2):
        raise ValueError(f"need m > n >= 2, got {m} x {n}")
    half = n // 2
    mg = m - half
    G = np.random.default_rng(seed).standard_normal((mg, half))
    indptr = np.concatenate(
        [np.arange(0, mg * half + 1, half, dtype=np.int64),
         mg * half + np.arange(1, half + 1, dtype=np.int64)]
    )
    indices = np.concatenate(
        [np.tile(np.arange(half, dtype=np.int64), mg),
         np.arange(half, n, dtype=np.int64)]
    )
    data = np.concatenate([G.ravel(), np.ones(half)])
    return CsrMatrix(m, n, indptr, indices, data)


def _apply_rotation(sup1: dict, sup2: dict, c: float, s: float):
    """Rotate two support dicts in place: (v1, v2) -> (c v1 + s v2, -s v1 + c v2)."""
    cols = set(sup1) | set(sup2)
    for col in cols:
        a = sup1.get(col, 0.0)
        b = sup2.get(col, 0.0)
        v1 = c * a + s * b
        v2 = -s * a + c * b
        if v1 != 0.0:
            sup1[col] = v1
        else:
            sup1.pop(col, None)
        if v2 != 0.0:
            sup2[col] = v2
        else:
            sup2.pop(col, None)


def gen_sprand(m: int, n: int, density: float, cond: float, seed: int) -> CsrMatrix:
    """Sparse matrix with nnz close to density*m*n and condition number ``cond``.

    Starts from a sparse skeleton carrying a geometric singular-value profile
    sigma_j = cond^(-j/(n-1)) at n scattered positions, then mixes it with
    random Givens rotations on row and column pairs until the target density
    is reached. Rotations are orthogonal, so the singular values (and hence
    the condition number) are preserved exactly up to rounding.
    """
    if not (0.0 < density <= 1.0):
        raise ValueError(f"density must be in (0, 1], got {density}")
    if cond < 1.0:
        raise ValueError(f"condition number must be >= 1, got {cond}")
    if not (m > n >= 2):
        raise ValueError(f"need m > n >= 2, got {m} x {n}")
    target = int(round(density * m * n))
    if target < n:
        raise ValueError(
            f"density {density} gives {target} nonzeros, below the {n} needed for full rank"
        )
    rng = np.random.default_rng(seed)
    sigma = cond ** (-np.arange(n) / (n - 1))
    skel_rows = rng.permutation(m)[:n]
    rows: dict[int, dict[int, float]] = {int(r): {j: float(sigma[j])} for j, r in enumerate(skel_rows)}
    col_rows: list[set[int]] = [{int(skel_rows[j])} for j in range(n)]
    nnz = n
    stop = math.floor(0.97 * target)

    def rotate_cols(j1: int, j2: int) -> None:
        nonlocal nnz
        theta = rng.uniform(0.0, 2.0 * math.pi)
        c, s = math.cos(theta), math.sin(theta)
        for i in col_rows[j1] | col_rows[j2]:
            sup = rows.setdefault(int(i), {})
            a = sup.get(j1, 0.0)
            b = sup.get(j2, 0.0)
            for j, v in ((j1, c * a + s * b), (j2, -s * a + c * b)):
                had = j in sup
                if v != 0.0:
                    if not had:
                        nnz += 1
                        col_rows[j].add(int(i))
                    sup[j] = v
                elif had:
                    del sup[j]
                    nnz -= 1
                    col_rows[j].discard(int(i))

    def rotate_rows(i1: int, i2: int, theta: float | None = None) -> None:
        nonlocal nnz
        sup1 = rows[i1]
        sup2 = rows.setdefault(i2, {})
        before1, before2 = set(sup1), set(sup2)
        if theta is None:
            theta = rng.uniform(0.0, 2.0 * math.pi)
        _apply_rotation(sup1, sup2, math.cos(theta), math.sin(theta))
        for i, before, after in ((i1, before1, set(sup1)), (i2, before2, set(sup2))):
            for j in after - before:
                col_rows[j].add(i)
            for j in before - after:
                col_rows[j].discard(i)
            nnz += len(after) - len(before)
        if not sup2:
            del rows[i2]
        if not sup1:
            del rows[i1]

    # Warm-up: pair up all columns once so no singular direction stays axis
    # aligned, then repeatedly split every nonempty row into a fresh empty
    # row with a bounded rotation angle. A never-rotated row keeps its whole
    # left singular direction (leverage exactly 1, a fully coherent matrix);
    # each bounded-angle split pass caps the per-row share at 3/4.
    perm = rng.permutation(n)
    for k in range(0, n - 1, 2):
        if nnz + 2 > 1.02 * target:
            break
        rotate_cols(int(perm[k]), int(perm[k + 1]))
    spread_budget = 0.6 * target
    for _ in range(8):
        if nnz * 2 > spread_budget or len(rows) * 4 > m:
            break
        for i1 in list(rows.keys()):
            if nnz + len(rows[i1]) > spread_budget:
                break
            i2 = int(rng.integers(m))
            while i2 in rows or i2 == i1:
                i2 = int(rng.integers(m))
            rotate_rows(i1, i2, theta=rng.uniform(math.pi / 6.0, math.pi / 3.0))

    it = 0
    cap = 200 * n + 40 * target
    while nnz < stop and it < cap:
        it += 1
        if it % 4 == 0:
            j1, j2 = (int(v) for v in rng.choice(n, size=2, replace=False))
            grow = (
                2 * len(col_rows[j1] | col_rows[j2])
                - len(col_rows[j1]) - len(col_rows[j2])
            )
            if nnz + grow > 1.05 * target and nnz >= 0.9 * target:
                break
            rotate_cols(j1, j2)
        else:
            keys = list(rows.keys())
            # Favor small rows: spreading them widens the support without
            # burning much of the nnz budget, keeping leverage flat.
            cand = [int(keys[rng.integers(len(keys))]) for _ in range(4)]
            i1 = min(cand, key=lambda k: len(rows[k]))
            i2 = int(rng.integers(m))
            if i2 == i1:
                continue
            sup2 = rows.get(i2, ())
            union = set(rows[i1]) | set(sup2)
            grow = 2 * len(union) - len(rows[i1]) - len(sup2)
            if nnz + grow > 1.05 * target:
                if nnz >= 0.9 * target:
                    break
                # Spread the smallest row into an empty one instead.
                small = min(rows, key=lambda k: len(rows[k]))
                empties = [int(e) for e in rng.integers(0, m, size=64) if int(e) not in rows]
                if not empties:
                    break
                i1, i2 = int(small), empties[0]
            rotate_rows(i1, i2)
    row_ids, col_ids, vals = [], [], []
    for i in sorted(rows):
        for j, v in rows[i].items():
            row_ids.append(i)
            col_ids.append(j)
            vals.append(v)
    return CsrMatrix.from_coo(m, n, row_ids, col_ids, vals)


def gen_udv(m: int, n: int, cond: float, seed: int) -> np.ndarray:
    """Dense A = U diag(d) V with orthonormal factors and singular values on
    an arithmetic grid from 1 to ``cond``, so the condition number is exact."""
    if not (m > n >= 2):
        raise ValueError(f"need m > n >= 2, got {m} x {n}")
    if cond < 1.0:
        raise ValueError(f"condition number must be >= 1, got {cond}")
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((m, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    dvals = np.linspace(1.0, cond, n)
    return (U * dvals) @ V


def gen_powerlaw_graph(
    n: int,
    beta: float,
    d: float,
    seed: int,
    *,
    i0: int | None = None,
    max_deg: float | None = None,
) -> GraphModel:
    """Random graph whose expected degrees follow a power law.

    Vertex i (indexed from ``i0``) gets weight
    ``w_i = c i^(-1/(beta-1))`` with ``c = (beta-2)/(beta-1) * d * n^(-1/(beta-1))``,
    and an edge (i, j) appears independently with probability
    ``min(w_i w_j / sum(w), 1)``, so the expected degree of vertex i equals
    w_i (up to clamping). ``d`` scales the degrees; large ``beta`` flattens
    them toward d. ``i0`` caps the maximum expected degree at w_{i0}; pass it
    directly or give ``max_deg`` to derive it. Defaults to i0 = 11.
    """
    if beta <= 2.0:
        raise ValueError(f"power-law exponent must exceed 2, got {beta}")
    if d < 1.0:
        raise ValueError(f"degree parameter must be >= 1, got {d}")
    if n < 2:
        raise ValueError(f"need at least 2 vertices, got {n}")
    gamma = 1.0 / (beta - 1.0)
    c = (beta - 2.0) / (beta - 1.0) * d * n ** (-gamma)
    if i0 is None:
        if max_deg is not None:
            # Invert w(i0) = max_deg.
            i0 = max(1, round((c / max_deg) ** (beta - 1.0)))
        else:
            i0 = 11
    idx = np.arange(i0, i0 + n, dtype=np.float64)
    w = c * idx ** (-gamma)
    rho = 1.0 / w.sum()
    P = np.minimum(np.outer(w, w) * rho, 1.0)
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < P, k=1)
    adj = (upper | upper.T).astype(np.float64)
    adjacency = CsrMatrix.from_dense(adj)
    src, dst = np.nonzero(upper)
    incidence = _incidence_from_edges(src, dst, n)
    return GraphModel(
        n=n, beta=beta, d=d, i0=int(i0), max_expected_degree=float(w[0]),
        weights=w, adjacency=adjacency, incidence=incidence,
    )


def _incidence_from_edges(src: np.ndarray, dst: np.ndarray, n: int) -> CsrMatrix:
    m = src.shape[0]
    indptr = np.arange(0, 2 * m + 1, 2, dtype=np.int64)
    indices = np.empty(2 * m, dtype=np.int64)
    indices[0::2] = src
    indices[1::2] = dst
    data = np.empty(2 * m)
    data[0::2] = 1.0
    data[1::2] = -1.0
    return CsrMatrix(m, n, indptr, indices, data)


def build_incidence_from_square(adjacency: CsrMatrix) -> CsrMatrix:
    """Incidence matrix of the graph whose edges are the off-diagonal nonzero
    positions of ``adjacency^T adjacency`` (vertices sharing a neighbor).

    Self-loops (the diagonal) are dropped; each edge appears once, oriented
    +1 at the lower index.
    """
    dense = adjacency.to_dense()
    if not np.array_equal(dense, dense.T):
        raise ValueError("adjacency must be symmetric")
    square = dense.T @ dense
    src, dst = np.nonzero(np.triu(square, k=1))
    if src.size == 0:
        raise ValueError("derived edge set is empty")
    return _incidence_from_edges(src, dst, adjacency.cols)


def glue_graphs(B1: CsrMatrix, B2: CsrMatrix) -> CsrMatrix:
    """Stack two incidence matrices, identifying the last 5 vertices of the
    first graph with the first 5 of the second."""
    if B1.cols < GLUE_OVERLAP or B2.cols < GLUE_OVERLAP:
        raise ValueError(
            f"both graphs need at least {GLUE_OVERLAP} vertices to glue"
        )
    shift = B1.cols - GLUE_OVERLAP
    cols = B1.cols + B2.cols - GLUE_OVERLAP
    indptr = np.concatenate([B1.indptr, B1.nnz + B2.indptr[1:]])
    indices = np.concatenate([B1.indices, B2.indices + shift])
    data = np.concatenate([B1.data, B2.data])
    return CsrMatrix(B1.rows + B2.rows, cols, indptr, indices, data)


def filter_isolated(B: CsrMatrix) -> CsrMatrix:
    """Drop all-zero columns (isolated vertices) so column normalization is safe."""
    counts = np.bincount(B.indices, minlength=B.cols)
    keep = counts > 0
    if np.all(keep):
        return B
    remap = np.cumsum(keep) - 1
    return CsrMatrix(B.rows, int(keep.sum()), B.indptr, remap[B.indices], B.data)


def gen_graph_laplacian(
    n: int,
    seed: int,
    *,
    beta1: float = 5.0,
    d1: float = 30.0,
    beta2: float = 8.0,
    d2: float | None = None,
    i0: int = 11,
) -> tuple[CsrMatrix, dict]:
    """Full incidence pipeline: two power-law graphs on n vertices each
    (the second dense, with average degree defaulting to 5n), squared into
    derived edge sets, glued with a 5-vertex overlap, isolated vertices
    dropped. Returns the incidence matrix and a metadata dict."""
    if d2 is None:
        d2 = 5.0 * n
    g1 = gen_powerlaw_graph(n, beta1, d1, seed, i0=i0)
    g2 = gen_powerlaw_graph(n, beta2, d2, seed + 1, i0=i0)
    B1 = build_incidence_from_square(g1.adjacency)
    B2 = build_incidence_from_square(g2.adjacency)
    glued = glue_graphs(B1, B2)
    B = filter_isolated(glued)
    info = {
        "model_vertices": n,
        "beta1": beta1, "d1": d1, "beta2": beta2, "d2": d2, "i0": i0,
        "edges_graph1": B1.rows, "edges_graph2": B2.rows,
        "vertices_before_filter": glued.cols,
        "vertices": B.cols, "edges": B.rows,
    }
    return B, info


def consistent_rhs(A, seed: int, noise: float = 0.0):
    """Right-hand side b = A x_true for a drawn Gaussian x_true.

    ``noise > 0`` adds a Gaussian perturbation of that relative magnitude,
    turning the system into a genuine (inconsistent) least-squares problem.
    Returns ``(b, x_true)``.
    """
    m, n = shape_of(A)
    rng = np.random.default_rng(seed)
    x_true = rng.standard_normal(n)
    b = matvec(A, x_true)
    if noise > 0.0:
        g = rng.standard_normal(m)
        b = b + noise * np.linalg.norm(b) * g / np.linalg.norm(g)
    return b, x_true
