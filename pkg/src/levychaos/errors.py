"""Exception hierarchy shared by all engines."""


class LevyChaosError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LevyChaosError):
    """Invalid problem description (bad config file, bad parameters)."""


class CapacityError(LevyChaosError):
    """A combinatorial size cap was exceeded."""


class UnsupportedIntegrandError(LevyChaosError):
    """The measure representation cannot evaluate the requested integrand."""


class IntegrationError(LevyChaosError):
    """Numerical quadrature failed to converge."""
