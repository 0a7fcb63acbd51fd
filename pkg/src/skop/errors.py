"""Exception types shared across the package.

The CLI maps these to exit codes: ConfigError -> 1, NumericError -> 2,
BoundViolation -> 3 (only under --strict).
"""


class SkopError(Exception):
    pass


class ConfigError(SkopError):
    """Malformed or inconsistent configuration (bad key, unknown family, ...)."""


class NumericError(SkopError):
    """A numeric procedure could not certify its result."""


class TruncationError(NumericError):
    """Series truncation radius too small for the requested accuracy."""


class MomentConditionError(NumericError):
    """A required kernel moment is infinite."""


class SchemeWindowError(NumericError):
    """The sampling scheme's stored index window does not cover the active range."""


class BoundViolation(SkopError):
    """A measured error exceeded its theoretical bound (raised only in strict mode)."""
