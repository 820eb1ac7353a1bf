"""Exception hierarchy.

Every error raised deliberately by the library derives from
:class:`ProFrameError`, which itself is a ``ValueError`` so that callers
catching bad-input errors generically keep working.
"""


class ProFrameError(ValueError):
    pass


class ShapeMismatch(ProFrameError):
    pass


class NotHermitian(ProFrameError):
    pass


class SpectrumOutOfDomain(ProFrameError):
    pass


class LevelOutOfRange(ProFrameError, IndexError):
    pass


class ChainMismatch(ProFrameError):
    pass


class SpaceMismatch(ProFrameError):
    pass


class InvalidCount(ProFrameError):
    pass


class CountMismatch(ProFrameError):
    pass


class NotInvertible(ProFrameError):
    pass


class NotPositiveInvertible(ProFrameError):
    pass


class NotAProjection(ProFrameError):
    pass


class NotInSpace(ProFrameError):
    """A vector fails the membership test ``P(xi) == xi`` of a projective module."""


class NotAFrame(ProFrameError):
    """The optimal lower frame bound is numerically zero."""


class VerificationFailure(ProFrameError):
    """An internal consistency identity did not hold within tolerance."""


class NotScalarLevels(ProFrameError):
    pass


class ParseError(ProFrameError):
    pass


class ValidationError(ProFrameError):
    """Scenario content violates an invariant; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
