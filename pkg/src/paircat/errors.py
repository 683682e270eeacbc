"""Exception types and process exit codes shared across the package."""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class NumericalGuardError(RuntimeError):
    """A numerical safety check failed (truncation, norm drift, grid clipping)."""


class TruncationError(NumericalGuardError):
    """Requested tail bound cannot be certified within the Fock-space cap."""


class GridTooSmallError(NumericalGuardError):
    """Raster grid would visibly clip the state (boundary amplitude too large)."""


class NormDriftError(NumericalGuardError):
    """State norm drifted during integration; step size too coarse."""


class DegenerateStateError(NumericalGuardError):
    """Superposition is numerically null and cannot be normalized."""


class OracleMismatchError(NumericalGuardError):
    """The two independent reference propagators disagree beyond tolerance."""


class ConfigError(ValueError):
    """Invalid experiment configuration; carries every validation failure."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the documented process exit code."""
    if isinstance(exc, (ConfigError, ValueError)):
        return EXIT_VALIDATION
    if isinstance(exc, (NumericalGuardError, OverflowError)):
        return EXIT_NUMERICAL
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_NUMERICAL
