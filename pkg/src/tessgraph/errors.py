"""Exception hierarchy for graph construction, traversal and estimation."""


class GeometryError(ValueError):
    """Base class for rejected geometric input."""


class GraphValidationError(GeometryError):
    """A graph invariant is violated.

    ``element`` names the first offending item (node index, link index or a
    pair of link indices) in the order the validator scans them.
    """

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class DuplicateNode(GraphValidationError):
    pass


class LoopLink(GraphValidationError):
    pass


class DuplicateLink(GraphValidationError):
    pass


class CrossingLinkInteriors(GraphValidationError):
    pass


class NodeOnLinkInterior(GraphValidationError):
    pass


class ToleranceFailure(GeometryError):
    """Two candidate nodes are too close to be distinct but too far to merge."""


class DegenerateTangency(GeometryError):
    """A link touches the window circle tangentially or ends on it."""


class AmbiguousContainment(GeometryError):
    """A containment test point lies within tolerance of a circuit."""


class NonClosingWalk(RuntimeError):
    """A first-exit walk failed to return to its start (internal error)."""


class TurningSumAnomaly(RuntimeError):
    """A circuit's turning-angle sum is not +-2*pi within tolerance."""


class EmptyWindow(ValueError):
    """An estimator denominator vanishes."""


class CoverageTimeout(RuntimeError):
    """The falling-leaf process did not cover the window within its budget."""
