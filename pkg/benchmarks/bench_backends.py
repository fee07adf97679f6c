#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the four hot kernels (CSR matvec, CSR transpose matvec, symmetric
Gauss-Seidel sweeps, sparse Gram accumulation) on solver-sized inputs, plus
one end-to-end preconditioned solve per backend. Run from the repository
root:

    python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

from rslsq import (
    CsrMatrix,
    SolverConfig,
    backends,
    consistent_rhs,
    gen_sprand,
    lsq_solve_rs,
)
from rslsq import _kernels_py

try:
    from rslsq import _kernels_c
except ImportError:
    _kernels_c = None


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(kernels, A, gram, reps):
    x = np.linspace(-1.0, 1.0, A.cols)
    y = np.linspace(-1.0, 1.0, A.rows)
    out_m = np.empty(A.rows)
    out_r = np.empty(A.cols)
    diag = np.diag(gram.to_dense()).copy()
    r = np.linspace(-1.0, 1.0, gram.rows)
    e = np.zeros(gram.rows)
    buf = np.zeros((A.cols, A.cols))

    def run_sgs():
        e[:] = 0.0
        kernels.sgs_sweeps(gram.indptr, gram.indices, gram.data, diag, r, e, 5)

    def run_gram():
        buf[:] = 0.0
        kernels.csr_gram_dense(A.indptr, A.indices, A.data, buf)

    return {
        "csr_matvec": time_call(
            lambda: kernels.csr_matvec(A.indptr, A.indices, A.data, x, out_m), reps
        ),
        "csr_rmatvec": time_call(
            lambda: kernels.csr_rmatvec(A.indptr, A.indices, A.data, y, out_r), reps
        ),
        "sgs_sweeps(t=5)": time_call(run_sgs, reps),
        "gram_accumulate": time_call(run_gram, reps),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller problem, fewer repeats")
    args = parser.parse_args()

    m, n, density, reps = (20000, 200, 0.02, 5) if not args.quick else (4000, 80, 0.02, 3)
    print(f"problem: sparse {m} x {n}, density {density}; best of {reps}")
    A = gen_sprand(m, n, density, 50.0, seed=0)
    gram_dense = A.to_dense().T @ A.to_dense()
    gram = CsrMatrix.from_dense(gram_dense + np.eye(n))

    results = {"python": bench_kernels(_kernels_py, A, gram, reps)}
    if _kernels_c is not None:
        results["compiled"] = bench_kernels(_kernels_c, A, gram, reps)

    names = list(results["python"])
    width = max(len(s) for s in names)
    header = f"{'kernel':<{width}}  " + "".join(f"{k:>12}" for k in results)
    if len(results) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name in names:
        line = f"{name:<{width}}  " + "".join(f"{results[k][name]:>12.2e}" for k in results)
        if len(results) == 2:
            line += f"{results['python'][name] / results['compiled'][name]:>9.1f}x"
        print(line)

    b, _ = consistent_rhs(A, seed=1, noise=0.1)
    print("\nend-to-end lsq_solve_rs on the same matrix:")
    for name in results:
        backends._active = _kernels_c if name == "compiled" else _kernels_py
        t0 = time.perf_counter()
        _, rep = lsq_solve_rs(A, b, SolverConfig(seed=2))
        total = time.perf_counter() - t0
        print(
            f"  {name:>8}: {total:.3f}s "
            f"(setup {rep.setup_seconds:.3f}s, solve {rep.solve_seconds:.3f}s, "
            f"{rep.iterations} iterations, converged={rep.converged})"
        )
    backends._active = _kernels_c if _kernels_c is not None else _kernels_py


if __name__ == "__main__":
    main()
