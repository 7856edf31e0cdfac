"""Exception hierarchy shared across the package."""


class AncdmError(Exception):
    pass


class InvalidConstellationError(AncdmError, ValueError):
    pass


class InvalidSymbolError(AncdmError, ValueError):
    pass


class FramingError(AncdmError, ValueError):
    """Sequence lengths or bit counts do not fit the frame structure."""


class DegenerateSignalError(AncdmError, ValueError):
    pass


class ConfigError(AncdmError, ValueError):
    pass


class NumericFailure(AncdmError, RuntimeError):
    """Quadrature did not converge; ``diagnostics`` holds what the integrator reported."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
