"""Exception types raised by the numerical routines."""


class NclassError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(NclassError, ValueError):
    pass


class DomainError(NclassError, ValueError):
    """A parameter lies outside the range where the quantity is defined."""


class TruncationError(NclassError, ArithmeticError):
    """Fock truncation discards more probability than the configured tolerance."""

    def __init__(self, message, tail_mass=None):
        super().__init__(message)
        self.tail_mass = tail_mass


class NumericalNegativityError(NclassError, ArithmeticError):
    pass


class RangeError(NclassError, OverflowError):
    """Argument too large for a double-precision evaluation."""

    def __init__(self, message, max_usable=None):
        super().__init__(message)
        self.max_usable = max_usable


class AccuracyError(NclassError, ArithmeticError):
    """Quadrature failed to self-converge; carries the best estimate."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SymmetryError(NclassError, ArithmeticError):
    """Imaginary residue of a real-by-symmetry integral is too large."""


class ConfigError(NclassError, ValueError):
    pass
