"""Exception types shared across the toolkit."""


class PodsegError(Exception):
    """Base class for every error raised by this package."""


class EmptyInput(PodsegError):
    """No usable content was left after preprocessing."""


class TooShort(PodsegError):
    """Input has fewer units than the operation requires."""


class FormatError(PodsegError):
    """A structured text input (e.g. a vector file) is malformed."""


class ParseError(PodsegError):
    """A corpus file could not be parsed; message names path and location."""


class UnsupportedFormat(PodsegError):
    """Requested input format is not one of the supported kinds."""


class OutOfRange(PodsegError):
    """A boundary index lies outside the annotated sentence range."""


class NonMonotonic(PodsegError):
    """Boundary indices are not strictly increasing."""


class BadScore(PodsegError):
    """A survey score is not an integer between 1 and 5."""


class DuplicateRow(PodsegError):
    """A (segment, title source, participant) triple occurs twice."""


class MissingScores(PodsegError):
    """A survey cell required by the relevancy aggregate is absent."""


class LengthMismatch(PodsegError):
    """Two segmentations cover a different number of sentences."""


class WindowTooLarge(PodsegError):
    """Metric window does not fit inside the segmentations."""


class DegenerateInput(PodsegError):
    """Numerical input carries no signal (e.g. all-zero vectors)."""


class DegenerateVariance(PodsegError):
    """A correlation operand is constant."""


class ServiceUnavailable(PodsegError):
    """The summarisation service kept failing after all retries."""


class EmptyTitle(PodsegError):
    """The summarisation service returned a blank title."""


class BadResponse(PodsegError):
    """The summarisation service returned a malformed response."""
