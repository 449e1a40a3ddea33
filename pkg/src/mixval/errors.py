"""Exception types raised across the package.

Every failure mode that callers are expected to handle gets its own class so
that tests and harness code can catch precisely what they mean to catch.
Names follow the condition they signal rather than carrying an ``Error``
suffix.
"""


class MixvalError(Exception):
    """Base class for all package-specific exceptions."""


# ---------------------------------------------------------------------------
# mixture data model

class ArityMismatch(MixvalError):
    """A constituent tuple has the wrong length for the dataset arity."""


class DuplicateConstituent(MixvalError):
    """An unordered mixture repeats a constituent (self-mixtures excluded)."""


class InsufficientMembers(MixvalError):
    """A collection is too small to form mixtures of the requested arity."""


class UnknownConstituent(MixvalError):
    """A mixture references an id absent from its declared collection."""


class DuplicateMixture(MixvalError):
    """Two records canonicalize to the same mixture key."""


class MixedLabelKinds(MixvalError):
    """A label does not match the dataset's declared label kind."""


# ---------------------------------------------------------------------------
# fold construction

class TooManyFolds(MixvalError):
    """More folds requested than members (or records) available."""


class PartitionMismatch(MixvalError):
    """A fold partition does not cover exactly the dataset's collections."""


# ---------------------------------------------------------------------------
# descriptors

class MissingDescriptor(MixvalError):
    """A mixture constituent has no entry in the descriptor table."""


# ---------------------------------------------------------------------------
# learner

class EmptyTrainingSet(MixvalError):
    """fit() was called with no training rows."""


class DimensionMismatch(MixvalError):
    """Feature matrix and labels (or model) disagree on their dimensions."""


# ---------------------------------------------------------------------------
# metrics

class SingleClassValidation(MixvalError):
    """AUC is undefined because only one class is present."""


class LengthMismatch(MixvalError):
    """Paired metric inputs have different lengths."""


class EmptyList(MixvalError):
    """An aggregate was requested over zero values."""


# ---------------------------------------------------------------------------
# simulation and harness

class InvalidConfig(MixvalError):
    """A simulation configuration violates its invariants."""


class ConfigError(MixvalError):
    """An experiment configuration is incomplete or inconsistent."""


class IngestError(MixvalError):
    """A data file could not be ingested."""


class ParseError(IngestError):
    """A file failed to parse; carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RaggedRows(IngestError):
    """A descriptor file has rows of differing widths."""
