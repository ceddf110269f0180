"""
Exception types raised by the hexagonator toolkit.

Each error also derives from the builtin a caller would naturally catch,
so ``except ValueError`` around a command keeps working.
"""


class HexagonatorError(Exception):
    """Base class for every error raised by this package."""


class CoefficientDomainError(HexagonatorError, TypeError):
    """Symbolic and numeric coefficients were mixed."""


class OrderMismatchError(HexagonatorError, ValueError):
    """Two series with different truncation orders were combined."""


class ConstantTermError(HexagonatorError, ValueError):
    """A series has the wrong constant term for the requested operation."""


class InadmissibleIndexError(HexagonatorError, ValueError):
    """A zeta index is empty or has a leading entry below 2."""


class ConvergenceDomainError(HexagonatorError, ValueError):
    """A polylogarithm was requested outside its convergence disc."""


class PunctureError(HexagonatorError, ValueError):
    """A point, path or integration domain touches a singular locus."""


class EndpointMismatchError(HexagonatorError, ValueError):
    """Paths or 2-paths being pasted do not share the required boundary."""


class QuadratureError(HexagonatorError, RuntimeError):
    """An integrator failed or could not meet the requested tolerance."""
