"""Exception hierarchy shared by every bpfi module."""


class BPFIError(Exception):
    """Base class for all errors raised by bpfi."""


class InfeasibleDraw(BPFIError, ValueError):
    """A weight times the sample count is not an integer."""


class EmptyColumn(BPFIError, ValueError):
    pass


class NonFiniteValue(BPFIError, ValueError):
    pass


class UnknownFeature(BPFIError, KeyError):
    pass


class LengthMismatch(BPFIError, ValueError):
    pass


class DependencyUndefined(BPFIError, ValueError):
    """The target is almost surely constant, so the dependency has no value."""


class InvalidSize(BPFIError, ValueError):
    pass


class TooManyFeatures(BPFIError, ValueError):
    pass


class IncompleteCache(BPFIError, ValueError):
    pass


class InvalidK(BPFIError, ValueError):
    pass


class UnknownDataset(BPFIError, KeyError):
    pass


class MalformedSubmission(BPFIError, ValueError):
    pass
