"""Exception types shared across the toolkit."""


class CuspkitError(Exception):
    """Base class for all toolkit errors."""


class MalformedWord(CuspkitError):
    """A word uses symbols outside the model's alphabet."""


class UnsupportedFamily(CuspkitError):
    """The requested group family has no normal-form oracle."""


class ResourceLimit(CuspkitError):
    """A construction exceeded its configured vertex/element budget."""


class EmptyGraph(CuspkitError):
    """An operation received a graph with no vertices."""


class Disconnected(CuspkitError):
    """A distance query was made between vertices in different components."""


class DepthClipped(CuspkitError):
    """The horoball normal form needs levels above the truncation depth."""

    def __init__(self, msg, needed_depth=None):
        super().__init__(msg)
        self.needed_depth = needed_depth


class EnumerationCap(CuspkitError):
    """Geodesic enumeration hit its budget; results are partial."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class UnknownVertex(CuspkitError):
    """A vertex label does not exist in the space."""


class SampleExhausted(CuspkitError):
    """A sampler could not produce enough admissible samples."""


class TooShort(CuspkitError):
    """A geodesic is too short for the requested deep-penetration check."""


class NoOverlap(CuspkitError):
    """Fellow-traveling offsets leave no overlap window."""


class HalfIntegerOffset(CuspkitError):
    """An internal-point offset was not an integer (informational)."""


class RaysEquivalent(CuspkitError):
    """Two rays represent the same boundary approximation."""


class ResolutionMismatch(CuspkitError):
    """Ray operations need rays of equal resolution."""


class TooFewPoints(CuspkitError):
    """A metric construction needs at least two points."""


class EmptyNet(CuspkitError):
    """A boundary net is empty."""


class NormalFormUnavailable(CuspkitError):
    """The splitting machinery has no normal form for this configuration."""


class EndpointRemoved(CuspkitError):
    """A separation check would remove one of its own endpoints."""


class ParseError(CuspkitError):
    """A presentation/config file is malformed."""


class StaleCache(CuspkitError):
    """A cache file does not match the requesting model/parameters."""
