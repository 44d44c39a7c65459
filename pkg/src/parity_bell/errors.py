"""Exception types raised across the package."""


class ParityBellError(Exception):
    """Base class for all package errors."""


class CapacityError(ParityBellError):
    """A numerical-capacity limit was hit (truncation, quadrature, oracle size)."""


class CapExceeded(CapacityError, ValueError):
    pass


class InvalidTolerance(ParityBellError, ValueError):
    pass


class TruncationError(CapacityError):
    """The Fock truncation discards more weight than its tolerance allows."""


class DimensionTooLarge(CapacityError, ValueError):
    pass


class QuadratureInsufficient(CapacityError):
    pass


class NonUnitaryConfig(ParityBellError, ValueError):
    pass


class DimensionMismatch(ParityBellError, ValueError):
    pass


class UnknownTag(ParityBellError, ValueError):
    pass


class GridTooCoarse(ParityBellError, ValueError):
    pass


class BoundExceeded(ParityBellError):
    """A configurational search returned F above tanh(2 zeta); indicates a bug."""
