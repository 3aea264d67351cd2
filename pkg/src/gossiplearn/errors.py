"""Exception types shared across the package."""


class GossipLearnError(Exception):
    """Base class for every error raised by this library."""


class NotStronglyConnected(GossipLearnError):
    """A sub-network is not strongly connected."""

    def __init__(self, network_index: int, message: str = ""):
        self.network_index = network_index
        detail = f": {message}" if message else ""
        super().__init__(f"sub-network {network_index} is not strongly connected{detail}")


class ExplosionGuard(GossipLearnError):
    """A combinatorial enumeration would exceed the configured cap."""


class ToleranceViolation(GossipLearnError):
    """A certification check failed; carries the failing cases."""

    def __init__(self, failures, message: str = "certification failed"):
        self.failures = tuple(failures)
        super().__init__(f"{message} ({len(self.failures)} failing case(s))")


class SupportMismatch(GossipLearnError):
    """Two distributions do not share a support size."""


class UnknownLink(GossipLearnError):
    """A delivered message does not correspond to an incoming link."""


class MissingDesignated(GossipLearnError):
    """A fusion round did not receive every designated agent's state."""


class NotFaulty(GossipLearnError):
    """forge() was called for an agent outside the Byzantine set."""


class NonpositiveMass(GossipLearnError):
    """Belief projection requires a strictly positive mass."""


class IdentifiabilityFailure(GossipLearnError):
    """The signal model is not globally observable."""


class TooFewValues(GossipLearnError):
    """Trimming 2F extremes needs at least 2F+1 values."""


class TooFewNeighbors(GossipLearnError):
    """An agent inside a certified network has in-degree below 2F+1."""


class AssumptionViolation(GossipLearnError):
    """A structural precondition of the Byzantine dynamics does not hold."""


class NotRowStochastic(GossipLearnError):
    """A matrix expected to be row-stochastic is not."""


class HorizonTooSmall(GossipLearnError):
    """A convergence bound is only defined from round 2*Gamma on."""


class ParseError(GossipLearnError):
    """A configuration file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(GossipLearnError):
    """A configuration parsed but failed cross-validation.

    Carries the full list of violations, not just the first one.
    """

    def __init__(self, violations):
        self.violations = tuple(violations)
        listing = "; ".join(self.violations)
        super().__init__(f"invalid configuration: {listing}")


class InstanceTooLarge(GossipLearnError):
    """The instance exceeds the dense-matrix oracle size cap."""
