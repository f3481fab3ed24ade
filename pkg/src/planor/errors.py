"""Exception types shared across the oracle pipeline."""


class PlanorError(Exception):
    """Base class for all library errors."""


class NotPlanarEmbedding(PlanorError):
    """Rotation system fails the Euler check for a sphere embedding."""


class DisconnectedGraph(PlanorError):
    """The oracle requires a connected input graph."""


class UnreachableVertex(PlanorError):
    """A vertex could not be reached from the source."""


class NoSeparatorFound(PlanorError):
    """No balanced fundamental cycle exists; input was not triangulated."""


class NotAncestor(PlanorError):
    """Shortcut routing requested between non-ancestor regions."""


class EmptyCandidateSet(PlanorError):
    """Portal construction needs at least one candidate on the path."""


class NotInRegion(PlanorError):
    """Query vertex does not belong to the region it was routed to."""


class UnknownVertex(PlanorError):
    """Vertex id outside the graph."""


class FormatError(PlanorError):
    """Malformed graph text file or oracle binary."""
