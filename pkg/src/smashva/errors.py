"""Exception types shared across the package."""


class DomainError(ValueError):
    """An operation was called outside its mathematical domain."""


class TruncationError(ArithmeticError):
    """A result could not be certified on any exponent window.

    Raised when truncated series data is insufficient to compute a
    requested coefficient exactly.  Checkers translate this into an
    "undecidable" outcome, never into "fail".
    """


class ConfigError(ValueError):
    """A lattice spec file or suite configuration is invalid."""
