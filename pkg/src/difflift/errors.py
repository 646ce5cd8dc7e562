"""Exception hierarchy shared by all modules."""


class LiftingError(Exception):
    """Base class for every error raised by difflift."""


class DimensionError(LiftingError, ValueError):
    pass


class InvalidFramework(LiftingError, ValueError):
    pass


class NotSelfStress(LiftingError):
    """The supplied stress (or force-load) violates equilibrium."""


NotEquilibrium = NotSelfStress


class ConsistencyError(LiftingError):
    """A neighbouring condition failed on a re-checked adjacency."""


class ContinuityError(LiftingError):
    pass


class NotPlanar(LiftingError):
    """The framework has crossing edges where a crossing-free one is needed."""


class CollinearOverlap(LiftingError, ValueError):
    pass


class PointOnFramework(LiftingError, ValueError):
    pass


class DegenerateDual(LiftingError):
    pass


class DegenerateConfiguration(LiftingError):
    """A generic-position assumption failed (projection, cone, path)."""


class NonTransversal(DegenerateConfiguration):
    pass


class NonSimplePath(DegenerateConfiguration):
    pass


class LoopsIntersect(LiftingError, ValueError):
    pass


class InvalidComplex(LiftingError, ValueError):
    pass


class SchemaError(LiftingError, ValueError):
    pass
