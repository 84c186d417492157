"""Exception types shared across the package."""


class FinquakesError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FinquakesError):
    """Invalid simulation configuration, network dimensions, or placement."""


class SeriesParseError(FinquakesError):
    """A market data row failed to parse. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class SeriesValidationError(FinquakesError):
    """Parsed market data violates a series invariant (positivity, date order)."""


class InsufficientHistoryError(FinquakesError):
    """Not enough preceding price changes for the requested indicator window."""


class InsufficientDataError(FinquakesError):
    """Too few distribution points inside the requested fit range."""


class NonTerminationError(FinquakesError):
    """An avalanche exceeded the toppling guard.

    Never expected for dissipation < 1; exists as a diagnostic against
    configuration or logic errors.
    """
