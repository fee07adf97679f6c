"""Least squares solver with a row-norm sampling Gauss-Seidel preconditioner.

Workflow: normalize columns, sample rows with probability proportional to
squared row norm, assemble the sampled Gram matrix, wrap it in a symmetric
Gauss-Seidel preconditioner, and run PCG on the normal equation.
"""

__version__ = "0.1.0"

from .backends import backend_name, compiled_available
from .errors import (
    BreakdownError,
    GramDegenerateError,
    InvalidMatrixError,
    MatrixMarketError,
    RankDeficientError,
    RslsqError,
    ShapeMismatchError,
    ZeroColumnError,
)
from .matrix import (
    CsrMatrix,
    column_norms,
    frobenius_norm,
    matvec,
    normalize_columns,
    row_squared_norms,
    transpose_matvec,
)
from .mmio import mm_read, mm_write
from .sampling import (
    SamplePlan,
    SamplingDensity,
    apply_sample,
    default_sample_size,
    draw_sample_plan,
    row_sampling_density,
    uniform_density,
)
from .precond import GramMatrix, SgsPreconditioner, assemble_gram, build_preconditioner, sgs_apply
from .solvers import (
    SolveReport,
    SolverConfig,
    cg_normal,
    dense_lsq_oracle,
    lsq_solve_cg,
    lsq_solve_rs,
    pcg_normal,
)
from .generators import (
    GraphModel,
    build_incidence_from_square,
    consistent_rhs,
    filter_isolated,
    gen_gaussian,
    gen_graph_laplacian,
    gen_powerlaw_graph,
    gen_semi_gaussian,
    gen_sprand,
    gen_udv,
    glue_graphs,
)
from .diagnostics import (
    ConcentrationReport,
    FilteredGramReport,
    HighFrequencyReport,
    SpectralSummary,
    concentration_test,
    filtered_gram_export,
    high_frequency_test,
    spectral_summary,
)
