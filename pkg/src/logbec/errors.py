"""Exception hierarchy shared by all modules."""


class LogBECError(Exception):
    """Base class for errors raised by logbec."""


class ConfigurationError(LogBECError, ValueError):
    """Invalid configuration, unit or grid setup."""


class DomainError(LogBECError, ValueError):
    """Input outside the domain where a formula is defined."""


class SimulationError(LogBECError, RuntimeError):
    """A physics run failed (width collapse, etc.)."""


class StiffnessError(SimulationError):
    """Adaptive step size underflowed."""


class NumericalQualityError(SimulationError):
    """A diagnostic (e.g. norm drift) exceeded its threshold."""
