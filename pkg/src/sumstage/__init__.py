"""sumstage: staged sentence-selection annotation, analytics and evaluation."""

from .corpus import (
    Document,
    Paragraph,
    SegConfig,
    Section,
    Sentence,
    StructureHint,
    build_document,
    load_document,
    segment,
    split_sentences,
    store_document,
)
from .session import (
    Annotation,
    AnnotationSession,
    SessionConfig,
    StageId,
    StageKind,
    candidates,
    finalize,
    start_session,
    submit_stage,
    validate_annotation,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "AnnotationSession",
    "Document",
    "Paragraph",
    "Section",
    "SegConfig",
    "Sentence",
    "SessionConfig",
    "StageId",
    "StageKind",
    "StructureHint",
    "build_document",
    "candidates",
    "finalize",
    "load_document",
    "segment",
    "split_sentences",
    "start_session",
    "store_document",
    "submit_stage",
    "validate_annotation",
    "__version__",
]
