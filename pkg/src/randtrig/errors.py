"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad model name, bad parameters or an invalid experiment config."""


class DegeneratePolynomialError(ValueError):
    """The polynomial (or sample) is identically zero / has zero variance."""


class OracleFailure(RuntimeError):
    """The companion-matrix oracle could not produce trustworthy roots."""


class NumericalError(RuntimeError):
    """A factorization or iteration failed even after its fallbacks."""


class DegenerateSampleError(ValueError):
    """A sample with zero spread where a density estimate is required."""
