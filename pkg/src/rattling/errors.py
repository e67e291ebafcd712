"""Exception hierarchy shared by all modules."""


class RattlingError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RattlingError, ValueError):
    """An argument lies outside the domain of a function or operator."""


class MonotoneTimeError(RattlingError, ValueError):
    """A relay was updated with a time earlier than its previous update."""


class AccuracyError(RattlingError, ArithmeticError):
    """A numerical method failed to reach its requested tolerance."""


class NoProgressError(RattlingError, RuntimeError):
    """The event loop stalled without finding the next switching."""


class StepSizeError(RattlingError, RuntimeError):
    """The ODE integrator could not continue (step size underflow)."""


class InvariantViolation(RattlingError, RuntimeError):
    """A computed solution broke one of its mathematical invariants."""


class BoundaryViolation(InvariantViolation):
    """A node of the truncated lattice boundary switched."""
