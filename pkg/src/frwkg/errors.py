"""Exception hierarchy shared across the package."""


class FRWError(Exception):
    """Base class for all package errors."""


class DegenerateEquationOfState(FRWError, ValueError):
    """w sits on the exponential line w = -(D-3)/(D-1); no power-law exponent exists."""


class MissingW(FRWError, ValueError):
    pass


class NonIntegerPowerNegativeBase(FRWError, ValueError):
    pass


class FrameMismatch(FRWError, ValueError):
    pass


class InvalidGrid(FRWError, ValueError):
    pass


class InvalidParameters(FRWError, ValueError):
    pass


class LatticeMismatch(FRWError, ValueError):
    pass


class UnknownColumn(FRWError, KeyError):
    pass


class BlowUp(FRWError, ArithmeticError):
    """Numerical solution became non-finite or exceeded the blow-up threshold."""

    def __init__(self, tau, message=None):
        self.tau = tau
        super().__init__(message or f"blow-up detected at tau={tau!r}")


class NoConvergence(FRWError, RuntimeError):
    pass


class ConfigError(FRWError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class ValidationError(ConfigError):
    pass
