"""Exception hierarchy shared by every boxcommit module."""

from __future__ import annotations


class BoxCommitError(Exception):
    """Base class for all library errors."""


# -- box model ---------------------------------------------------------------

class ValidationFailure(BoxCommitError):
    """A raw entry table is not a valid binary-output non-signaling box."""


class NotNormalized(ValidationFailure):
    def __init__(self, u, v, total):
        self.u, self.v, self.total = u, v, total
        super().__init__(f"W(..|{u}{v}) sums to {total}, not 1")


class SignalingToAlice(ValidationFailure):
    def __init__(self, u, v, v2, x):
        self.u, self.v, self.v2, self.x = u, v, v2, x
        super().__init__(
            f"Alice marginal W^A({x}|{u}) differs between Bob inputs v={v} and v'={v2}"
        )


class SignalingToBob(ValidationFailure):
    def __init__(self, u, u2, v, y):
        self.u, self.u2, self.v, self.y = u, u2, v, y
        super().__init__(
            f"Bob marginal W^B({y}|{v}) differs between Alice inputs u={u} and u'={u2}"
        )


class NonBinaryOutput(ValidationFailure):
    pass


class NegativeProbability(ValidationFailure):
    pass


class BoxSyntaxError(BoxCommitError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DoubleUse(BoxCommitError):
    pass


class InvalidInput(BoxCommitError):
    pass


class InvalidParameter(BoxCommitError):
    pass


# -- convex classifier -------------------------------------------------------

class EmptyHull(BoxCommitError):
    pass


class AlphabetTooLarge(BoxCommitError):
    pass


class Unclassifiable(BoxCommitError):
    """The case analysis finished without a verdict. Always a bug."""


# -- info-stats ---------------------------------------------------------------

class InvalidEpsilon(BoxCommitError):
    pass


class ParameterOutOfRange(BoxCommitError):
    pass


class LengthMismatch(BoxCommitError):
    pass


# -- codes and hashing --------------------------------------------------------

class RetriesExhausted(BoxCommitError):
    def __init__(self, message: str, best_distance: int | None = None):
        self.best_distance = best_distance
        super().__init__(message)


class DimensionTooLarge(BoxCommitError):
    pass


class TooLargeForExhaustive(BoxCommitError):
    pass


# -- protocols ----------------------------------------------------------------

class InfeasibleAtThisN(BoxCommitError):
    """Raised by the schedulers. ``partial`` holds whatever was computed."""

    def __init__(self, message: str, partial: dict | None = None):
        self.partial = dict(partial or {})
        super().__init__(message)


class ProtocolStateError(BoxCommitError):
    pass
