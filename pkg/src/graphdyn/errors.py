"""Exception hierarchy shared by all graphdyn modules."""


class GraphDynError(Exception):
    """Base class for every error raised by graphdyn."""


class StructuralError(GraphDynError, ValueError):
    """Malformed graph, point, arc or map (unknown ids, bad coordinates)."""


class ValidationError(StructuralError):
    """A map spec or serialized value failed validation."""


class DomainError(GraphDynError, ValueError):
    """Operation called outside its domain (empty set, eps <= 0, ...)."""


class ResourceError(GraphDynError, RuntimeError):
    """A configured resource cap (nodes, itineraries, denominators) was hit."""


class ContractError(GraphDynError, ValueError):
    """Caller-side precondition violated, e.g. an unverified covering chain."""


class InvariantError(GraphDynError, AssertionError):
    """Internal invariant violated; always a bug."""


class NotMarkovError(GraphDynError):
    """The cut-set orbit did not close within the requested depth."""
