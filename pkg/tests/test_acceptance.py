"""Acceptance suite: each test checks one reproduction target end to end at
its stated tolerance and records a pass/fail line for the terminal summary.

Two targets are kept although they cannot pass as stated (the failure is a
property of the pinned problem sizes, not of this implementation); the
analysis lives next to the assertion:

* criterion 3a: at n = 100 the normal matrix has 100 distinct eigenvalues,
  so CG finitely terminates in about 135 iterations, inside the 300 budget
  it is required to exhaust.
* criterion 7: at s = ceil(4 n ln n) the sampled Gram deviation has median
  2 sqrt(n/s) = 1/sqrt(ln n), which is 0.506 at n = 50; a 0.5 threshold sits
  at the median, so the required 95 of 100 success rate is out of reach.
"""

import time

import numpy as np
import pytest

from conftest import record_criterion

import rslsq
from rslsq import (
    CsrMatrix,
    SolverConfig,
    apply_sample,
    build_preconditioner,
    cg_normal,
    concentration_test,
    consistent_rhs,
    default_sample_size,
    dense_lsq_oracle,
    draw_sample_plan,
    gen_gaussian,
    gen_graph_laplacian,
    gen_semi_gaussian,
    gen_sprand,
    gen_udv,
    lsq_solve_cg,
    lsq_solve_rs,
    matvec,
    mm_read,
    mm_write,
    normalize_columns,
    pcg_normal,
    row_sampling_density,
    spectral_summary,
)


def test_criterion_01_gaussian_reproduction():
    t0 = time.perf_counter()
    A = gen_gaussian(3000, 109, seed=1)
    b, _ = consistent_rhs(A, seed=2, noise=0.1)
    _, rep_cg = lsq_solve_cg(A, b)
    rs_iters, rs_resid = [], []
    for t in range(10):
        _, rep = lsq_solve_rs(A, b, SolverConfig(seed=10 + t))
        rs_iters.append(rep.iterations)
        rs_resid.append(rep.final_relres)
    elapsed = time.perf_counter() - t0
    mean_rs = float(np.mean(rs_iters))
    ok = (
        9 <= mean_rs <= 14
        and 8 <= rep_cg.iterations <= 13
        and rep_cg.final_relres <= 1e-7
        and max(rs_resid) <= 1e-7
        and elapsed < 5.0
    )
    record_criterion(
        "1", ok,
        f"gaussian 3000x109: Iter.CG={rep_cg.iterations}, Iter.RS mean={mean_rs:.1f}, "
        f"max relres={max(max(rs_resid), rep_cg.final_relres):.2e}, {elapsed:.2f}s",
    )
    assert 9 <= mean_rs <= 14
    assert 8 <= rep_cg.iterations <= 13
    assert rep_cg.final_relres <= 1e-7 and max(rs_resid) <= 1e-7
    assert elapsed < 5.0


def test_criterion_02_semi_gaussian_coherent_case():
    A = gen_semi_gaussian(3000, 108, seed=3)
    summary = spectral_summary(A)
    b, _ = consistent_rhs(A, seed=4, noise=0.1)
    iters = []
    for t in range(10):
        _, rep = lsq_solve_rs(A, b, SolverConfig(seed=20 + t))
        assert rep.converged  # the coherent case must not fail
        iters.append(rep.iterations)
    mean_rs = float(np.mean(iters))
    ok = summary.coherence == 1.0 and 10 <= mean_rs <= 14
    record_criterion(
        "2", ok, f"semi-gaussian 3000x108: mu={summary.coherence}, Iter.RS mean={mean_rs:.1f}"
    )
    assert summary.coherence == 1.0
    assert 10 <= mean_rs <= 14


def test_criterion_03a_udv_separation():
    A = gen_udv(9000, 100, 1e3, seed=11)
    summary = spectral_summary(A)
    assert abs(summary.kappa_normal - 1e6) <= 0.01 * 1e6
    b, _ = consistent_rhs(A, seed=12, noise=0.1)
    _, rep_cg = lsq_solve_cg(A, b, SolverConfig(max_iter=300))
    _, rep_rs = lsq_solve_rs(A, b, SolverConfig(seed=13))
    ok = (not rep_cg.converged) and rep_rs.converged and rep_rs.iterations <= 120
    record_criterion(
        "3a", ok,
        f"udv 9000x100 kappa=1e6: CG {rep_cg.iterations} its "
        f"(converged={rep_cg.converged}), RS {rep_rs.iterations} its",
    )
    assert rep_rs.converged and rep_rs.iterations <= 120
    # Unattainable as stated: with only n = 100 distinct eigenvalues CG
    # finitely terminates near 135 iterations for any right-hand side, seed
    # or normalization (see decisions ledger). The phenomenon it encodes is
    # real and is demonstrated at n = 300 in
    # tests/test_solvers.py::TestUdvSeparationAtPaperScale.
    assert not rep_cg.converged, (
        f"CG converged in {rep_cg.iterations} <= 300 iterations: finite "
        "termination over 100 distinct eigenvalues defeats the 300-iteration "
        "budget at this problem size"
    )


def test_criterion_03b_sprand_iteration_ratio():
    A = gen_sprand(20000, 150, 0.01, 80.0, seed=17)
    summary = spectral_summary(A)
    b, _ = consistent_rhs(A, seed=18, noise=0.1)
    _, rep_cg = lsq_solve_cg(A, b)
    iters = []
    for t in range(5):
        _, rep = lsq_solve_rs(A, b, SolverConfig(seed=500 + t))
        assert rep.converged
        iters.append(rep.iterations)
    ratio = rep_cg.iterations / float(np.mean(iters))
    ok = 3e3 <= summary.kappa_normal <= 2e4 and ratio >= 2.5
    record_criterion(
        "3b", ok,
        f"sprand 20000x150: kappa={summary.kappa_normal:.3g}, "
        f"Iter.CG/Iter.RS = {rep_cg.iterations}/{np.mean(iters):.1f} = {ratio:.2f}",
    )
    assert 3e3 <= summary.kappa_normal <= 2e4
    assert ratio >= 2.5


def test_criterion_04_graph_laplacian():
    t0 = time.perf_counter()
    B, info = gen_graph_laplacian(100, seed=53)  # glued pipeline, ~187 vertices
    assert 175 <= info["vertices"] <= 195
    b, _ = consistent_rhs(B, seed=55)
    _, rep_cg = lsq_solve_cg(B, b)
    iters = []
    for t in range(10):
        _, rep = lsq_solve_rs(B, b, SolverConfig(seed=300 + t))
        assert rep.converged
        iters.append(rep.iterations)
    elapsed = time.perf_counter() - t0
    mean_rs = float(np.mean(iters))
    ok = mean_rs <= 25 and rep_cg.iterations >= 1.6 * mean_rs and elapsed < 10.0
    record_criterion(
        "4", ok,
        f"graph laplacian n={info['vertices']}: Iter.CG={rep_cg.iterations}, "
        f"Iter.RS mean={mean_rs:.1f}, ratio={rep_cg.iterations / mean_rs:.2f}, {elapsed:.2f}s",
    )
    assert mean_rs <= 25
    assert rep_cg.iterations >= 1.6 * mean_rs
    assert elapsed < 10.0


def test_criterion_05_sample_size_formula():
    got = (default_sample_size(100), default_sample_size(709))
    ok = got == (1843, 18616)
    record_criterion("5", ok, f"sample sizes for n=100, 709: {got}")
    assert got == (1843, 18616)
    assert default_sample_size(187) == 3913


def test_criterion_06_unbiasedness():
    t0 = time.perf_counter()
    A = gen_gaussian(20, 5, seed=8)
    G = A.T @ A
    density = row_sampling_density(A)
    trials = 10_000
    mean = np.zeros((5, 5))
    m2 = np.zeros((5, 5))
    for t in range(trials):
        plan = draw_sample_plan(density, 1, seed=60_000 + t)
        As = apply_sample(A, plan)
        Gs = As.T @ As
        delta = Gs - mean
        mean += delta / (t + 1)
        m2 += delta * (Gs - mean)
    se = np.sqrt(m2 / (trials - 1) / trials)
    worst = float(np.max(np.abs(mean - G) / se))
    elapsed = time.perf_counter() - t0
    ok = worst <= 3.0 and elapsed < 5.0
    record_criterion("6", ok, f"unbiasedness 20x5, 1e4 draws: worst dev {worst:.2f} SE, {elapsed:.2f}s")
    assert worst <= 3.0
    assert elapsed < 5.0


def test_criterion_07_concentration():
    A, _ = normalize_columns(gen_gaussian(2000, 50, seed=5))
    s = default_sample_size(50)
    assert s == 783
    rep = concentration_test(A, s, 0.5, 100, seed=6)
    for k in range(rep.trials):
        if rep.norms[k] <= rep.epsilon:
            # Eigenvalue sandwich must hold in every successful trial.
            assert rep.sampled_lambda_min[k] >= rep.true_lambda_min - rep.epsilon - 1e-10
            assert rep.sampled_lambda_max[k] <= rep.true_lambda_max + rep.epsilon + 1e-10
    successes = int(rep.successes)
    ok = successes >= 95
    record_criterion(
        "7", ok,
        f"concentration n=50 m=2000 s=783 eps=0.5: {successes}/100 "
        f"(median dev {float(np.median(rep.norms)):.3f})",
    )
    # Unattainable as stated: the deviation median is 2 sqrt(n/s) =
    # 1/sqrt(ln 50) = 0.506, so the 0.5 threshold bisects the distribution
    # (see decisions ledger; an independent estimator implementation gives
    # the same statistics). At eps = 0.7 the rate exceeds 95/100, as checked
    # in tests/test_diagnostics.py.
    assert successes >= 95, (
        f"{successes}/100 trials reached 0.5: the threshold equals the "
        "deviation median at this size, not its 95th percentile"
    )


def test_criterion_08_oracle_equivalence():
    rng = np.random.default_rng(77)
    for k in range(25):
        m = int(rng.integers(120, 501))
        n = int(rng.integers(10, 41))
        A = gen_gaussian(m, n, seed=1000 + k)
        b, _ = consistent_rhs(A, seed=2000 + k, noise=float(rng.uniform(0.0, 0.3)))
        x, rep = lsq_solve_rs(A, b, SolverConfig(seed=3000 + k))
        assert rep.converged
        x_star = dense_lsq_oracle(A, b)
        energy = np.linalg.norm(A @ (x - x_star)) / np.linalg.norm(A @ x_star)
        assert energy <= 1e-5, f"instance {k}: energy error {energy:.2e}"
    A = gen_gaussian(200, 25, seed=4000)
    b, _ = consistent_rhs(A, seed=4001, noise=0.1)
    for k in range(1, 6):
        cfg = SolverConfig(tol=1e-30, max_iter=k)
        x_cg, _ = cg_normal(A, b, cfg)
        x_pcg, _ = pcg_normal(A, b, lambda r: r.copy(), cfg)
        assert np.linalg.norm(x_pcg - x_cg) <= 1e-12 * max(1.0, np.linalg.norm(x_cg))
    record_criterion("8", True, "25 instances match the dense oracle; identity PCG == CG")


def test_criterion_09_preconditioner_contract():
    A, _ = normalize_columns(gen_gaussian(400, 12, seed=9))
    plan = draw_sample_plan(row_sampling_density(A), default_sample_size(12), seed=10)
    P = build_preconditioner(apply_sample(A, plan), 5)
    rng = np.random.default_rng(11)
    r1, r2 = rng.standard_normal((2, 12))
    lin = P(0.3 * r1 - 1.7 * r2) - (0.3 * P(r1) - 1.7 * P(r2))
    assert np.linalg.norm(lin) <= 1e-10 * np.linalg.norm(P(r1))
    sym = abs(P(r1) @ r2 - r1 @ P(r2))
    assert sym <= 1e-10 * max(abs(P(r1) @ r2), 1.0)
    for _ in range(100):
        r = rng.standard_normal(12)
        assert P(r) @ r > 0.0
    X = rng.standard_normal((30, 10))
    G = X.T @ X + np.eye(10)
    from rslsq.precond import GramMatrix, SgsPreconditioner

    P50 = SgsPreconditioner(
        GramMatrix(n=10, storage=CsrMatrix.from_dense(G), diag=np.diag(G).copy()), 50
    )
    r = rng.standard_normal(10)
    want = np.linalg.solve(G, r)
    err = np.linalg.norm(P50(r) - want) / np.linalg.norm(want)
    assert err <= 1e-8
    record_criterion(
        "9", True, f"SGS linear/symmetric/PD; t=50 direct-solve error {err:.2e}"
    )


def test_criterion_10_format_fidelity(tmp_path):
    rng = np.random.default_rng(12)
    dense = rng.standard_normal((40, 9)) / 7.0
    sparse = CsrMatrix.from_dense(dense * (rng.random((40, 9)) < 0.4))
    for name, A in (("dense", dense), ("sparse", sparse)):
        p1 = tmp_path / f"{name}1.mtx"
        p2 = tmp_path / f"{name}2.mtx"
        mm_write(p1, A)
        mm_write(p2, mm_read(p1))
        assert p1.read_bytes() == p2.read_bytes()
    back = mm_read(tmp_path / "dense1.mtx")
    assert np.array_equal(back, dense)
    record_criterion("10", True, "matrix files round-trip bit exactly at 17 digits")
    # The bench CSV golden-file comparison lives in
    # tests/test_cli.py::test_bench_matches_golden_file.
