"""Exception types shared across the solver."""


class LinalgError(Exception):
    """Base class for factorization and eigensolver failures."""


class NotPsd(LinalgError):
    """A pivot turned materially negative: the matrix is not PSD."""


class ConvergenceFailure(LinalgError):
    """Eigensolver did not reach the requested residual accuracy."""


class IllConditioned(LinalgError):
    """A triangular factor lost rank where full rank was guaranteed."""


class RankDeficient(LinalgError):
    """A matrix does not have the advertised full column rank."""


class BadInput(ValueError):
    """An operand violates a documented precondition."""


class CaseDUnresolved(Exception):
    """Repeated separation never reduced the projection to a congruent case."""


class InfeasibleStart(Exception):
    """The starting point is not feasible for the instance."""


class NegativeMultiplier(ValueError):
    """A dual multiplier is materially negative."""


class DimensionMismatch(ValueError):
    """Operands disagree on problem dimensions."""


class MasterInfeasible(Exception):
    """The outer LP became infeasible; valid cuts can never cause this."""


class NumericalStall(Exception):
    """The LP engine exceeded its pivot budget without terminating."""


class BadParams(ValueError):
    """Generator parameters are inconsistent."""


class DegenerateBase(ValueError):
    """A supposedly orthonormal base is numerically rank-deficient."""


class ParseError(ValueError):
    """Malformed instance file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFeature(ValueError):
    """Input uses a format feature outside the supported subset."""


class IoError(OSError):
    """Report emission failed."""
