"""Exception hierarchy shared by all sqrs modules."""


class SqrsError(Exception):
    """Base class for every error raised by the package."""


class DegenerateProbabilityError(SqrsError, ValueError):
    """An outcome probability is too close to zero for a Fisher evaluation."""


class DegenerateDenominatorError(SqrsError, ValueError):
    """The closed-form Fisher denominator vanishes (deterministic outcomes)."""


class NonPositiveFisherError(SqrsError, ValueError):
    pass


class InvalidBlochError(SqrsError, ValueError):
    """Bloch vector lies outside the unit ball."""


class NonPositiveMeanPhotonError(SqrsError, ValueError):
    pass


class EmptyCountsError(SqrsError, ValueError):
    """A likelihood was requested from a count vector with no observations."""


class GridMismatchError(SqrsError, ValueError):
    """Likelihood grids with different geometry were combined."""


class UndefinedMeanError(SqrsError, ValueError):
    """Circular mean requested for data with (numerically) zero resultant."""


class OrderingViolationError(SqrsError, RuntimeError):
    """A transcript entry was used before its message triple completed."""


class ConfigError(SqrsError, ValueError):
    """Invalid or unknown configuration value."""
