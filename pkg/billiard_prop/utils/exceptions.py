# billiard_prop/utils/exceptions.py


class BilliardError(Exception):
    """
    Base exception for all billiard-prop errors.
    """


class ConfigParseError(BilliardError):
    """Raised when a run configuration document cannot be read."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"key '{key}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ConfigValidationError(BilliardError):
    """Raised when a parsed configuration violates an invariant."""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class GeometryError(BilliardError, ValueError):
    """Raised for degenerate or inconsistent geometric input."""


class EigenstateError(BilliardError, ValueError):
    """Raised when an eigenstate cannot exist for the requested shape and indices."""


class ThetaError(BilliardError):
    """Raised when a theta series is asked for outside its domain."""


class NonConvergentError(ThetaError):
    """
    Raised when undamped (|q| = 1) evaluation does not fall below tolerance.
    """


class ThetaOverflowError(ThetaError):
    """Raised when growth in Im(zeta) outpaces the nome decay."""


class QuadratureError(BilliardError):
    """Raised when a quadrature misses its tolerance."""

    def __init__(self, message: str, error_estimate: float):
        self.error_estimate = error_estimate
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")


class ObservableError(BilliardError, ValueError):
    """Raised when an observable is not defined for the given state."""


class OutputError(BilliardError):
    """Raised when output files cannot be written."""
