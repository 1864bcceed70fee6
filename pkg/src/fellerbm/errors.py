"""Exception types shared across the package."""


class FellerBMError(ValueError):
    """Base class for domain errors raised by this package."""


class AllZero(FellerBMError):
    """Wentzell coefficients sum to zero; no boundary condition given."""


class PureDirichlet(FellerBMError):
    """(a0,b0,c0)=(1,0,0) excludes every process admitted here."""


class NegativeStart(FellerBMError):
    """Half-line constructions need start >= 0."""


class StartOutOfRange(FellerBMError):
    """Start point outside the process state space."""


class BadEps(FellerBMError):
    """Downcrossing width must be positive."""


class NotAdditiveFunctional(FellerBMError):
    """Killing clocks must be nondecreasing with A_0 = 0."""


class NonPositiveTime(FellerBMError):
    """Kernels are defined for t > 0 only."""


class NonPositiveLambda(FellerBMError):
    """Resolvents are defined for lambda > 0 only."""


class SingularSystem(FellerBMError):
    """Interval boundary closure produced a (near-)singular 2x2 system."""


class GridTooShort(FellerBMError):
    """Time horizon too short for the requested Laplace truncation error."""


class ConfigError(FellerBMError):
    """Base class for CLI / config-file problems."""


class UnknownKey(ConfigError):
    """Config key not recognized."""


class MissingRequired(ConfigError):
    """Config key required by the command but absent."""


class TypeMismatch(ConfigError):
    """Config value failed to parse at the required type."""
