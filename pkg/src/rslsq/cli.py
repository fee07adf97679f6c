"""Command-line harness: generate corpora, solve single systems, run
benchmark sweeps, and invoke diagnostics.

Subcommands: ``gen``, ``solve``, ``bench``, ``diag``. Exit codes: 0 success
(solve: converged), 2 solver did not converge, 1 error.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import RslsqError
from .generators import (
    consistent_rhs,
    gen_gaussian,
    gen_graph_laplacian,
    gen_semi_gaussian,
    gen_sprand,
    gen_udv,
)
from .matrix import nnz_of, normalize_columns, shape_of
from .mmio import mm_read, mm_write
from .sampling import apply_sample, default_sample_size, draw_sample_plan, row_sampling_density
from .diagnostics import (
    concentration_test,
    filtered_gram_export,
    high_frequency_test,
    spectral_summary,
)
from .solvers import SolverConfig, lsq_solve_cg, lsq_solve_rs

FAMILIES = ("gaussian", "semi_gaussian", "sprand", "udv", "graph_laplacian")

CSV_COLUMNS = [
    "n", "m", "nnz", "kappa_normal", "mu",
    "residual_cg", "iter_cg", "residual_rs", "iter_rs",
    "time_cg", "setup_cg", "time_rs", "setup_rs",
    "iter_mean", "iter_std", "time_mean", "time_std", "setup_mean", "setup_std",
]
TIMING_COLUMNS = {
    "time_cg", "setup_cg", "time_rs", "setup_rs",
    "time_mean", "time_std", "setup_mean", "setup_std",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    parser.add_argument("--tol", type=float, default=1e-7, help="relative residual tolerance")
    parser.add_argument("--sample-factor", type=float, default=4.0,
                        help="sample size factor in ceil(factor * n * ln n)")
    parser.add_argument("--sgs-sweeps", type=int, default=5,
                        help="symmetric Gauss-Seidel sweeps per preconditioner application")
    parser.add_argument("--max-iter", type=int, default=None, help="iteration cap (default 5n)")
    parser.add_argument("--out", type=str, default=".", help="output directory")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        tol=args.tol,
        max_iter=args.max_iter,
        sgs_sweeps=args.sgs_sweeps,
        sample_factor=args.sample_factor,
        seed=args.seed,
    )


_REQUIRED_PARAMS = {
    "gaussian": ("m", "n"),
    "semi_gaussian": ("m", "n"),
    "sprand": ("m", "n", "density", "cond"),
    "udv": ("m", "n", "cond"),
    "graph_laplacian": ("n",),
}


def _generate(family: str, params: dict, seed: int):
    """Returns (matrix, manifest-extras)."""
    missing = [k for k in _REQUIRED_PARAMS[family] if params.get(k) is None]
    if missing:
        raise ValueError(f"family {family!r} requires --{', --'.join(missing)}")
    if family == "gaussian":
        return gen_gaussian(params["m"], params["n"], seed), {}
    if family == "semi_gaussian":
        return gen_semi_gaussian(params["m"], params["n"], seed), {}
    if family == "sprand":
        return gen_sprand(params["m"], params["n"], params["density"], params["cond"], seed), {}
    if family == "udv":
        return gen_udv(params["m"], params["n"], params["cond"], seed), {}
    if family == "graph_laplacian":
        B, info = gen_graph_laplacian(
            params["n"], seed,
            beta1=params.get("beta1", 5.0), d1=params.get("d1", 30.0),
            beta2=params.get("beta2", 8.0), d2=params.get("d2"),
            i0=params.get("i0", 11),
        )
        return B, info
    raise ValueError(f"unknown family {family!r}")


def cmd_gen(args) -> int:
    params = {
        "m": args.m, "n": args.n, "density": args.density, "cond": args.cond,
        "beta1": args.beta1, "d1": args.d1, "beta2": args.beta2, "d2": args.d2,
        "i0": args.i0,
    }
    A, extras = _generate(args.family, params, args.seed)
    rows, cols = shape_of(A)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.family}_m{rows}_n{cols}_seed{args.seed}"
    mtx_path = out / f"{stem}.mtx"
    mm_write(mtx_path, A)
    manifest = {
        "family": args.family,
        "seed": args.seed,
        "rows": rows,
        "cols": cols,
        "nnz": nnz_of(A),
        "default_sample_size": default_sample_size(cols, args.sample_factor),
        "sample_factor": args.sample_factor,
        "sgs_sweeps": args.sgs_sweeps,
        "tol": args.tol,
        "matrix_file": mtx_path.name,
        "params": {k: v for k, v in params.items() if v is not None},
    }
    manifest.update(extras)
    manifest_path = out / f"{stem}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    print(json.dumps({"matrix": str(mtx_path), "manifest": str(manifest_path)}))
    return 0


def cmd_solve(args) -> int:
    A = mm_read(args.matrix)
    noise = args.noise_level if args.rhs_mode == "noisy" else 0.0
    b, _ = consistent_rhs(A, args.seed, noise)
    cfg = _solver_config(args)
    if args.method == "cg":
        x, report = lsq_solve_cg(A, b, cfg)
    else:
        x, report = lsq_solve_rs(A, b, cfg)
    payload = {"method": args.method, "matrix": args.matrix, **report.to_dict()}
    text = json.dumps(payload, indent=2)
    print(text)
    if args.report:
        Path(args.report).write_text(text + "\n")
    return 0 if report.converged else 2


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.6e}"


def _bench_row(family: str, params: dict, cfg: SolverConfig, repeats: int, seed: int, noise: float) -> dict:
    A, _ = _generate(family, params, seed)
    rows, cols = shape_of(A)
    b, _ = consistent_rhs(A, seed + 1, noise)
    summary = spectral_summary(A)
    _, rep_cg = lsq_solve_cg(A, b, replace(cfg, seed=seed))
    rs_reports = []
    for t in range(repeats):
        _, rep = lsq_solve_rs(A, b, replace(cfg, seed=seed + t))
        rs_reports.append(rep)
    first = rs_reports[0]
    iters = [r.iterations for r in rs_reports]
    times = [r.solve_seconds for r in rs_reports]
    setups = [r.setup_seconds for r in rs_reports]

    def _std(values):
        return statistics.stdev(values) if repeats > 1 else None

    return {
        "n": cols, "m": rows, "nnz": nnz_of(A),
        "kappa_normal": summary.kappa_normal, "mu": summary.coherence,
        "residual_cg": rep_cg.final_relres, "iter_cg": rep_cg.iterations,
        "residual_rs": first.final_relres, "iter_rs": first.iterations,
        "time_cg": rep_cg.solve_seconds, "setup_cg": rep_cg.setup_seconds,
        "time_rs": first.solve_seconds, "setup_rs": first.setup_seconds,
        "iter_mean": statistics.mean(iters), "iter_std": _std(iters),
        "time_mean": statistics.mean(times), "time_std": _std(times),
        "setup_mean": statistics.mean(setups), "setup_std": _std(setups),
    }


def _write_markdown(path: Path, family: str, table: list[dict]) -> None:
    def fmt(v):
        return _fmt_cell(v)

    lines = [f"# {family} benchmark", ""]
    lines.append("## Residual and Iteration Steps")
    lines.append("")
    lines.append("| n | m | nnz(A) | kappa(A^T A) | mu(A) | Residual.CG | Iter.CG | Residual.RS | Iter.RS |")
    lines.append("|---|---|---|---|---|---|---|---|---|")
    for r in table:
        lines.append(
            "| " + " | ".join(fmt(r[k]) for k in
                              ("n", "m", "nnz", "kappa_normal", "mu",
                               "residual_cg", "iter_cg", "residual_rs", "iter_rs")) + " |"
        )
    lines.append("")
    lines.append("## Elapsed CPU Time")
    lines.append("")
    lines.append("| n | m | Time.CG | Setup.CG | Sum.CG | Time.RS | Setup.RS | Sum.RS |")
    lines.append("|---|---|---|---|---|---|---|---|")
    for r in table:
        lines.append(
            "| " + " | ".join([
                fmt(r["n"]), fmt(r["m"]),
                fmt(r["time_cg"]), fmt(r["setup_cg"]), fmt(r["time_cg"] + r["setup_cg"]),
                fmt(r["time_rs"]), fmt(r["setup_rs"]), fmt(r["time_rs"] + r["setup_rs"]),
            ]) + " |"
        )
    lines.append("")
    lines.append("## Mean and Sample Standard Deviation")
    lines.append("")
    lines.append("| n | m | Iter.Mean | Iter.Std | Time.Mean | Time.Std | Setup.Mean | Setup.Std |")
    lines.append("|---|---|---|---|---|---|---|---|")
    for r in table:
        lines.append(
            "| " + " | ".join(fmt(r[k]) for k in
                              ("n", "m", "iter_mean", "iter_std",
                               "time_mean", "time_std", "setup_mean", "setup_std")) + " |"
        )
    lines.append("")
    path.write_text("\n".join(lines))


def cmd_bench(args) -> int:
    config = json.loads(Path(args.config).read_text())
    family = config["family"]
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    repeats = int(config.get("repeats", 10))
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    seed = int(config.get("seed", args.seed))
    noise = float(config.get("rhs_noise", 0.0))
    solver = config.get("solver", {})
    cfg = SolverConfig(
        tol=float(solver.get("tol", args.tol)),
        max_iter=solver.get("max_iter", args.max_iter),
        sgs_sweeps=int(solver.get("sgs_sweeps", args.sgs_sweeps)),
        sample_factor=float(solver.get("sample_factor", args.sample_factor)),
        seed=seed,
    )
    table = []
    for index, params in enumerate(config["rows"]):
        row_seed = seed + 104729 * index
        table.append(_bench_row(family, params, cfg, repeats, row_seed, noise))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{family}.csv"
    with open(csv_path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in table:
            fh.write(",".join(_fmt_cell(r[k]) for k in CSV_COLUMNS) + "\n")
    md_path = out / f"{family}.md"
    _write_markdown(md_path, family, table)
    print(json.dumps({"csv": str(csv_path), "markdown": str(md_path), "rows": len(table)}))
    return 0


def cmd_diag(args) -> int:
    A = mm_read(args.matrix)
    _, n = shape_of(A)
    if args.test == "spectral":
        result = spectral_summary(A).to_dict()
    else:
        scaled, _ = normalize_columns(A)
        s = args.sample_size or default_sample_size(n, args.sample_factor)
        if args.test == "concentration":
            result = concentration_test(scaled, s, args.epsilon, args.trials, args.seed).to_dict()
        elif args.test == "high-frequency":
            result = high_frequency_test(scaled, s, args.c_h, args.trials, args.seed).to_dict()
        else:  # filtered-gram
            plan = draw_sample_plan(row_sampling_density(scaled), s, args.seed)
            sampled = apply_sample(scaled, plan)
            prefix = str(Path(args.out) / (args.prefix or Path(args.matrix).stem))
            Path(args.out).mkdir(parents=True, exist_ok=True)
            result = filtered_gram_export(scaled, sampled, args.theta, prefix).to_dict()
    print(json.dumps(result, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rslsq",
        description="Overdetermined least squares via PCG with a row-sampling "
                    "Gauss-Seidel preconditioner",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a test matrix and manifest")
    p_gen.add_argument("--family", choices=FAMILIES, required=True)
    p_gen.add_argument("--m", type=int, default=None, help="rows (dense families)")
    p_gen.add_argument("--n", type=int, default=None, help="columns / graph vertices")
    p_gen.add_argument("--density", type=float, default=None, help="sprand target density")
    p_gen.add_argument("--cond", type=float, default=None, help="target condition number")
    p_gen.add_argument("--beta1", type=float, default=5.0, help="power-law exponent, graph 1")
    p_gen.add_argument("--d1", type=float, default=30.0, help="average degree, graph 1")
    p_gen.add_argument("--beta2", type=float, default=8.0, help="power-law exponent, graph 2")
    p_gen.add_argument("--d2", type=float, default=None, help="average degree, graph 2 (default 5n)")
    p_gen.add_argument("--i0", type=int, default=11, help="weight index offset (max-degree cap)")
    _add_common(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="solve a least squares system from a .mtx file")
    p_solve.add_argument("--matrix", required=True, help="Matrix Market file")
    p_solve.add_argument("--method", choices=("cg", "pcg-rs"), default="pcg-rs")
    p_solve.add_argument("--rhs-mode", choices=("consistent", "noisy"), default="consistent")
    p_solve.add_argument("--noise-level", type=float, default=0.1,
                         help="relative perturbation for --rhs-mode noisy")
    p_solve.add_argument("--report", default=None, help="also write the report JSON here")
    _add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="run a benchmark sweep from a config file")
    p_bench.add_argument("--config", required=True, help="JSON experiment config")
    _add_common(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_diag = sub.add_parser("diag", help="spectral and sampling diagnostics")
    p_diag.add_argument("--matrix", required=True, help="Matrix Market file")
    p_diag.add_argument("--test", required=True,
                        choices=("spectral", "concentration", "high-frequency", "filtered-gram"))
    p_diag.add_argument("--epsilon", type=float, default=0.5, help="concentration threshold")
    p_diag.add_argument("--trials", type=int, default=100)
    p_diag.add_argument("--sample-size", type=int, default=None,
                        help="rows to sample (default ceil(factor * n * ln n))")
    p_diag.add_argument("--c-h", type=float, default=4.0, help="high-frequency constant proxy")
    p_diag.add_argument("--theta", type=float, default=0.125, help="filtered-gram threshold")
    p_diag.add_argument("--prefix", default=None, help="filtered-gram output file prefix")
    _add_common(p_diag)
    p_diag.set_defaults(func=cmd_diag)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RslsqError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
