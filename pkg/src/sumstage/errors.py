"""Exception hierarchy shared by all sumstage modules."""

from __future__ import annotations


class SumstageError(Exception):
    """Base class for every error raised by this package."""


# --- corpus / schema ---------------------------------------------------------

class EmptyDocument(SumstageError):
    """No sentence survives whitespace trimming."""


class SchemaViolation(SumstageError):
    """A JSON payload does not match the declared schema.

    ``field`` is the dotted path of the offending field, e.g. ``sentences[3].span``.
    """

    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"schema violation at {field!r}")


class InvariantViolation(SumstageError):
    """A structural invariant of a document or annotation is broken."""

    def __init__(self, invariant: str, message: str | None = None):
        self.invariant = invariant
        super().__init__(message or f"invariant violated: {invariant}")


# --- annotation sessions -----------------------------------------------------

class SessionCompleted(SumstageError):
    """Operation applied to a session whose every stage has been submitted."""


class SessionIncomplete(SumstageError):
    """finalize() called before the session reached its last stage."""

    def __init__(self, stage):
        self.stage = stage
        super().__init__(f"session still at stage {stage}")


class BelowMinimum(SumstageError):
    """A stage submission does not meet its selection-count requirement."""

    def __init__(self, stage, required: int, got: int, exact: bool = False):
        self.stage = stage
        self.required = required
        self.got = got
        self.exact = exact
        word = "exactly" if exact else "at least"
        super().__init__(f"stage {stage} requires {word} {required} selections, got {got}")


class NotACandidate(SumstageError):
    """A submitted sentence index is not in the stage's candidate set."""

    def __init__(self, sentence_index: int):
        self.sentence_index = sentence_index
        super().__init__(f"sentence {sentence_index} is not a candidate at this stage")


class DefectiveOutsideParagraphStage(SumstageError):
    """Defective marks are only accepted while a paragraph is on screen."""


# --- service -----------------------------------------------------------------

class UnknownJudge(SumstageError):
    pass


class UnknownSession(SumstageError):
    pass


class UnknownDocument(SumstageError):
    pass


class DuplicateDocument(SumstageError):
    pass


class OwnershipViolation(SumstageError):
    """Caller is not the judge that owns the session."""


class DocumentMismatch(SumstageError):
    """Two annotations compared across different documents."""


# --- analytics / evaluation --------------------------------------------------

class MixedDocuments(SumstageError):
    """Annotations from different documents fed to a per-document statistic."""


class EmptyCorpus(SumstageError):
    pass


class DegenerateData(SumstageError):
    """Agreement coefficient undefined for the given ratings."""


class TooFewJudges(SumstageError):
    pass


class InvalidSentenceIndex(SumstageError):
    def __init__(self, doc_id: str, sentence_index: int):
        self.doc_id = doc_id
        self.sentence_index = sentence_index
        super().__init__(f"document {doc_id!r} has no sentence {sentence_index}")
