"""Exception hierarchy shared across the package."""


class GpigError(Exception):
    """Base class for all package errors."""


class ValidationError(GpigError):
    """A game specification violates one of its invariants."""


class NonUnitMass(ValidationError):
    pass


class NegativeProbability(ValidationError):
    pass


class DegenerateP0(ValidationError):
    """p0 is 0 or 1; the main algorithm's transience hypothesis fails."""


class ZeroTarget(ValidationError):
    pass


class IllegalAction(GpigError):
    pass


class OutOfDomain(GpigError):
    """Evaluation point outside [0, 1]."""


class OutOfRange(GpigError):
    """State or index outside the solved table."""


class WeightMassError(GpigError):
    """Affine-combination weights are negative or do not sum to one."""


class NoCrossing(GpigError):
    """The 2x2 system scan found no sign change (violated preconditions)."""


class MissingPrefix(GpigError):
    """A sub-game solve was attempted before its prerequisites."""


class NoConvergence(GpigError):
    pass


class UndefinedPolicyState(GpigError):
    pass
