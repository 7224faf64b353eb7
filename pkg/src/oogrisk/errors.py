"""Exception hierarchy and CLI exit codes."""

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4


class OogriskError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(OogriskError):
    """Bad input: dimension mismatch, out-of-range parameter, malformed document."""

    exit_code = EXIT_VALIDATION


class DimensionError(ValidationError):
    """Matrix block with incompatible dimensions; names the offending block."""

    def __init__(self, block, expected, actual):
        self.block = block
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"block {block!r}: expected shape {expected}, got {actual}"
        )


class OutOfDomainError(ValidationError):
    """Uncertainty value outside its box."""


class SolverError(OogriskError):
    """Numerical solver failed to produce a trustworthy answer."""

    exit_code = EXIT_SOLVER


class PoleProximityError(OogriskError):
    """Transfer-function evaluation point too close to a pole."""

    exit_code = EXIT_VALIDATION
