"""Exception types shared across the package."""


class RslsqError(Exception):
    """Base class for all package-specific errors."""


class ShapeMismatchError(RslsqError, ValueError):
    """Operand dimensions are incompatible."""


class InvalidMatrixError(RslsqError, ValueError):
    """A matrix violates its structural invariants."""


class ZeroColumnError(RslsqError, ValueError):
    """A column is identically zero where a nonzero column is required."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} is identically zero")


class MatrixMarketError(RslsqError, ValueError):
    """A Matrix Market file could not be parsed."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class GramDegenerateError(RslsqError, ValueError):
    """The sampled Gram matrix has a (near-)zero diagonal entry.

    Carries the offending column index; the usual cause is a sample plan
    that never touched that column.
    """

    def __init__(self, column: int, value: float):
        self.column = column
        self.value = value
        super().__init__(
            f"sampled Gram diagonal entry {column} is {value:.3e} (<= 1e-14)"
        )


class RankDeficientError(RslsqError, ValueError):
    """A factorization detected numerical rank deficiency."""


class BreakdownError(RslsqError, ArithmeticError):
    """Conjugate gradient breakdown (non-positive curvature or inner product)."""

    def __init__(self, message: str, iteration: int):
        self.iteration = iteration
        super().__init__(f"iteration {iteration}: {message}")
