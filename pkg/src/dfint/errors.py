"""Exception hierarchy shared by every dfint module."""


class DfintError(Exception):
    """Base class for all library errors."""

    kind = "DfintError"

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        cls.kind = cls.__name__


class PoleError(DfintError, ValueError):
    pass


class ZeroBaseError(DfintError, ValueError):
    pass


class BranchCutError(DfintError, ValueError):
    pass


class DegenerateParamError(DfintError, ValueError):
    pass


class ConvergenceError(DfintError, ArithmeticError):
    pass


class GeometryError(DfintError, ValueError):
    pass


class ToleranceError(DfintError, ArithmeticError):
    pass


class SingularityOnPathError(DfintError, ValueError):
    pass


class DivergentEndpointError(DfintError, ValueError):
    pass


class BranchTrackingError(DfintError, AssertionError):
    pass


class DomainError(DfintError, ValueError):
    pass


class IntegerExponentError(DfintError, ValueError):
    pass


class IntegerConditionError(DfintError, ValueError):
    pass


class IntegerAlphaError(DfintError, ValueError):
    pass


class NearHalfPiError(DfintError, ValueError):
    pass


class TailBoundError(DfintError, ArithmeticError):
    pass


class UsageError(DfintError, ValueError):
    pass
