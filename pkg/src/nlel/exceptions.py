"""Exception hierarchy for the nonlocal antiplane toolkit."""


class NlelError(Exception):
    """Base class for all errors raised by :mod:`nlel`."""


class InvalidParameter(NlelError, ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class SupersonicLoad(InvalidParameter):
    """The load travels at or above the shear wave speed; no decaying mode exists."""


class InvalidSpeed(InvalidParameter):
    """Dimensionless speed outside ``[0, 1)``."""


class DegenerateDenominator(InvalidParameter):
    """A closed-form expression hits a vanishing denominator."""


class ResonantDecay(InvalidParameter):
    """A profile decay rate coincides with the kernel rate ``1/a``."""


class OutOfBranch(InvalidParameter):
    """Wavenumber beyond the real propagating branch of a dispersion curve."""


class NoConvergence(NlelError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ConsistencyError(NlelError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


class ValidityWarning(UserWarning):
    """Small-parameter asymptotics used outside their nominal range."""
