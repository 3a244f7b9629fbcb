"""Exception taxonomy shared across the simulator, environment, solvers and gateway."""


class OrbitLabError(Exception):
    """Base class for all orbitlab errors."""


class ValidationError(OrbitLabError):
    """Malformed or non-finite input."""


class SingularityError(OrbitLabError):
    """Coincident bodies, or the integrator was driven arbitrarily close to collision."""

    def __init__(self, message, last_valid_time=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class ContractViolationError(OrbitLabError):
    """An operation was invoked with a force law outside its contract."""


class InsufficientCoverageError(OrbitLabError):
    """The data span less than the minimum required coverage (e.g. < 1 orbit)."""


class AmbiguityError(OrbitLabError):
    """A fit has a degenerate residual landscape and no unique answer."""


class ConditioningError(OrbitLabError):
    """The data lack the dynamic range needed for a well-conditioned fit."""


class SignalAbsentError(OrbitLabError):
    """The effect being fitted (e.g. orbital decay) is not present in the data."""


class ScenarioNotFoundError(OrbitLabError):
    """Unknown scenario id."""


class UnitError(OrbitLabError):
    """Units missing, unknown, or not convertible to the required dimension."""


# --- observation protocol errors ---------------------------------------------


class ObservationError(OrbitLabError):
    """Base class for observation-session failures. Failed calls never charge budget."""


class WindowError(ObservationError):
    """Requested time falls outside the session window."""


class CapError(ObservationError):
    """A single call requested more times than the per-call cap (or none at all)."""


class BudgetExhaustedError(ObservationError):
    """Granting the request would exceed the session's observation budget."""


class ProtocolError(ObservationError):
    """Operation not permitted under the session's protocol."""


# --- solver / harness errors --------------------------------------------------


class BindingError(OrbitLabError):
    """Task bound to a solver that cannot run on the supplied data."""


class EpisodeClosedError(OrbitLabError):
    """Message sent to an episode that has already reached a terminal state."""
