"""Exception hierarchy.

Every error raised on purpose by this package derives from RiskTextError so
callers can catch one type at the boundary.  Subclasses exist per failure
family rather than per call site; the message carries the specifics.
"""


class RiskTextError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(RiskTextError):
    """A tabular input is missing a required column."""


class RowError(RiskTextError):
    """A row of a tabular input failed validation.

    Carries the 1-based data row number in ``row``.
    """

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DuplicateKeyError(RiskTextError):
    """Two records share an identifier that must be unique."""


class EmptyCorpusError(RiskTextError):
    """No documents, or no document with any token."""


class DegenerateVocabularyError(RiskTextError):
    """A vocabulary term occurs in no document."""


class ZeroVectorError(RiskTextError):
    """Similarity against an all-zero vector is undefined."""


class EmbeddingFormatError(RiskTextError):
    """An embedding file has a malformed header or a ragged row.

    Carries the 1-based line number in ``line``.
    """

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class AlignmentError(RiskTextError):
    """Two structures that must describe the same axis disagree."""


class ParameterError(RiskTextError):
    """An argument is outside its documented domain."""


class DegeneratePointError(RiskTextError):
    """A data point is unusable for the requested geometry (e.g. zero norm)."""


class DegenerateDocumentError(RiskTextError):
    """A document row is unusable for the requested model (e.g. zero count sum)."""


class DegenerateFitError(RiskTextError):
    """Every restart of a model fit collapsed; no estimate is available."""


class OptimizationFailureError(RiskTextError):
    """An iterative fit could not take a finite step."""


class UndefinedSilhouetteError(RiskTextError):
    """Silhouette needs at least two populated clusters."""


class InsufficientTagsError(RiskTextError):
    """Validation over a tag subset needs at least two distinct tags."""


class UnknownSessionError(RiskTextError):
    """No session with the requested id."""


class UnknownDocumentError(RiskTextError):
    """No document with the requested id."""


class UnknownMethodError(RiskTextError):
    """No clustering result under the requested label."""


class RevisionConflictError(RiskTextError):
    """A tag commit presented a stale revision.

    Carries the server's current revision in ``current_revision``.
    """

    def __init__(self, current_revision: int, message: str = "stale revision"):
        super().__init__(message)
        self.current_revision = current_revision


class PipelineStageError(RiskTextError):
    """A pipeline stage failed; ``stage`` names it, ``__cause__`` has the detail."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
