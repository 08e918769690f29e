"""Exception hierarchy shared by every qsep module."""


class QsepError(Exception):
    """Base class for all qsep errors."""


class InvalidInput(QsepError, ValueError):
    """Input violates a structural precondition (shape, bounds, norm, ...)."""


class AllZeroTensor(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class NotUnitary(InvalidInput):
    pass


class NotRankTwo(QsepError):
    """Density matrix has more than two eigenvalues above tolerance."""

    def __init__(self, message, spectrum=None):
        super().__init__(message)
        self.spectrum = spectrum


class RankOne(NotRankTwo):
    pass


class FormulaMismatch(QsepError):
    """The invariant formula and the explicit minor sum disagree."""


class ConsistencyError(QsepError):
    """A post-hoc certificate (reconstruction, eigenvalue cross-check) failed."""


class NotSeparable(QsepError):
    pass


class NotRealCoefficients(QsepError):
    pass


class NotMaximallyEntangled(InvalidInput):
    pass


class NotOrthogonal(InvalidInput):
    pass


class IdenticalStates(InvalidInput):
    pass
