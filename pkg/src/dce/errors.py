"""Exception types shared across the pipeline."""


class DceError(Exception):
    """Base class for all library errors."""


class EmptySource(DceError):
    """Source text contains no lines after normalization."""


class IndexOutOfRange(DceError):
    """Line index outside 1..n."""


class MinimumSizeViolation(DceError):
    """Operation would produce an empty snippet."""


class NotACondition(DceError):
    """Masking requested on a non-condition line."""


class MalformedGuard(DceError):
    """Guard span of a condition line cannot be delimited."""


class UnknownPattern(DceError):
    """Pattern id not present in the catalog."""


class UnsupportedLanguage(DceError):
    """Language not registered, or pattern does not support it."""


class NoInsertionPoint(DceError):
    """Host snippet has no legal statement boundary for insertion."""


class ClassifierError(DceError):
    """Base for classifier transport failures; may carry the offending line."""

    def __init__(self, message: str, line_index: int | None = None):
        super().__init__(message)
        self.line_index = line_index


class RemoteUnavailable(ClassifierError):
    """Remote classifier unreachable after retries."""


class RemoteMalformed(ClassifierError):
    """Remote classifier violated the wire schema."""


class IneligibleLine(DceError):
    """Perturbation requested on a structural or blank/comment line."""


class InvalidTau(DceError):
    """Soft threshold scale below 1."""


class TransportUnavailable(DceError):
    """Chat transport failed to produce a response."""


class ReplayMiss(DceError):
    """No canned response recorded for this prompt hash."""


class UnparseableVerdict(DceError):
    """Model response lacked the 'Dead code:' header."""


class InsufficientCorpus(DceError):
    """Corpus too small for the requested dataset ratios."""


class MisalignedInputs(DceError):
    """Reports and gold records do not line up by id."""


class PatternLeakage(DceError):
    """Train and test pattern id sets overlap."""
