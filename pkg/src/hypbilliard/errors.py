"""Exception hierarchy shared by all modules."""


class HypBilliardError(Exception):
    """Base class for every error raised by the package."""


# geometry
class GeometryError(HypBilliardError):
    pass


class BoundaryTooClose(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class TangentialContact(GeometryError):
    pass


class NonIntersectingPlanes(GeometryError):
    pass


# polyhedra
class PolytopeError(HypBilliardError):
    pass


class NonConcircularFace(PolytopeError):
    pass


class EmptyInterior(PolytopeError):
    pass


class NonIdealVertex(PolytopeError):
    pass


class LambdaNotIntegral(PolytopeError, UserWarning):
    """Raised (or warned) when some pi/omega is not an integer.

    ``from_spec`` only warns and returns the polyhedron with
    ``coding_ready = False``; coding operations then raise this error.
    """


# billiard
class BilliardError(HypBilliardError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class EdgeOrVertexHit(BilliardError):
    pass


class NoForwardHit(BilliardError):
    pass


# codes
class CodeError(HypBilliardError):
    pass


class AlphabetMismatch(CodeError):
    pass


class PointOutOfRange(CodeError):
    pass


class CodeSyntaxError(CodeError):
    pass


class InvalidCode(CodeError):
    def __init__(self, violation):
        super().__init__(str(violation))
        self.violation = violation


# unfolding
class UnfoldError(HypBilliardError):
    pass


class NotNested(UnfoldError):
    pass


class NotConverged(UnfoldError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class CodeMismatch(UnfoldError):
    pass
