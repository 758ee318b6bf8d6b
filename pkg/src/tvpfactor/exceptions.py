"""Exception types shared across the package."""


class TvpFactorError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(TvpFactorError, ValueError):
    pass


class SingularPencil(TvpFactorError):
    """The matrix pencil (Gamma0, Gamma1) is numerically irregular."""


class NonPsdCovariance(TvpFactorError):
    """A covariance matrix lost positive semidefiniteness beyond tolerance."""


class InfeasibleParams(TvpFactorError, ValueError):
    """Structural parameters violate feasibility (e.g. negative steady-state consumption)."""


class NoConvergence(TvpFactorError):
    """An iterative solver exhausted its sweep budget."""


class PeriodFailure(TvpFactorError):
    """A per-period solve failed; carries the first failing period."""

    def __init__(self, t: int, message: str = ""):
        self.t = t
        super().__init__(f"period {t}: {message}" if message else f"period {t}")


class BlockSingular(PeriodFailure):
    """The A22 lag-polynomial block is numerically singular at some period."""


class UnstableInput(TvpFactorError, ValueError):
    pass


class PathLengthMismatch(TvpFactorError, ValueError):
    pass


class InsufficientTrainingData(TvpFactorError, ValueError):
    pass


class RankDeficientRegressors(TvpFactorError):
    pass


class NumericalOverflow(TvpFactorError):
    """State explosion inside a sampler; carries period and draw index."""

    def __init__(self, draw: int, t: int, message: str = ""):
        self.draw = draw
        self.t = t
        detail = f"draw {draw}, period {t}"
        super().__init__(f"{detail}: {message}" if message else detail)


class RankTooLow(TvpFactorError, ValueError):
    pass


class DegenerateLosses(TvpFactorError):
    pass


class TooFewDraws(TvpFactorError, ValueError):
    pass


class DegenerateHits(TvpFactorError):
    pass


class NonPositiveLogInput(TvpFactorError, ValueError):
    """Log transform applied to a non-positive value; names row and column."""

    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"non-positive value {value!r} in column {column!r} at row {row!r}"
        )


class MalformedDate(TvpFactorError, ValueError):
    pass


class RaggedRows(TvpFactorError, ValueError):
    pass


class NoStableSolution(TvpFactorError):
    """More explosive roots than expectational errors (existence failure)."""


class Indeterminacy(TvpFactorError):
    """Fewer explosive roots than expectational errors (multiple solutions)."""
