"""Four-stage annotation state machine.

A judge walks a document bottom-up: every paragraph of a section is summarized
by selecting sentences, then the section is summarized from those selections,
then the document from the section summaries, and finally a short summary of
exactly min(short_summary_size, |document summary|) sentences.  Each stage only
offers the sentences that survived the previous stage, so the four selection
sets form a nested chain per judge.

Sessions are immutable values: ``submit_stage`` returns a new session and never
mutates its input, which makes replay and concurrent use trivial.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Mapping

from .corpus import Document
from .errors import (
    BelowMinimum,
    DefectiveOutsideParagraphStage,
    EmptyDocument,
    InvariantViolation,
    NotACandidate,
    SchemaViolation,
    SessionCompleted,
    SessionIncomplete,
)


class StageKind(str, Enum):
    PARAGRAPH = "paragraph"
    SECTION = "section"
    DOCUMENT = "document"
    SHORT = "short"

    @property
    def level(self) -> int:
        """Ordinal depth of the stage: paragraph=1 ... short=4."""
        return _STAGE_ORDER.index(self) + 1


_STAGE_ORDER = (StageKind.PARAGRAPH, StageKind.SECTION, StageKind.DOCUMENT, StageKind.SHORT)


@dataclass(frozen=True)
class StageId:
    kind: StageKind
    section_index: int | None = None
    paragraph_index: int | None = None  # global paragraph index

    def __post_init__(self):
        if self.kind is StageKind.PARAGRAPH:
            ok = self.section_index is not None and self.paragraph_index is not None
        elif self.kind is StageKind.SECTION:
            ok = self.section_index is not None and self.paragraph_index is None
        else:
            ok = self.section_index is None and self.paragraph_index is None
        if not ok:
            raise ValueError(f"malformed stage id {self}")

    def __str__(self) -> str:
        if self.kind is StageKind.PARAGRAPH:
            return f"paragraph({self.section_index},{self.paragraph_index})"
        if self.kind is StageKind.SECTION:
            return f"section({self.section_index})"
        return self.kind.value


@dataclass(frozen=True)
class SessionConfig:
    min_paragraph_selections: int = 1
    min_section_selections: int = 1
    short_summary_size: int = 3

    def __post_init__(self):
        for name in ("min_paragraph_selections", "min_section_selections", "short_summary_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class AnnotationSession:
    session_id: str
    doc_id: str
    judge_id: str
    cursor: StageId | None  # None once every stage has been submitted
    paragraph_selections: Mapping[int, frozenset[int]] = field(default_factory=dict)
    section_selections: Mapping[int, frozenset[int]] = field(default_factory=dict)
    document_selection: frozenset[int] = frozenset()
    short_selection: frozenset[int] = frozenset()
    defective: frozenset[int] = frozenset()

    @property
    def is_completed(self) -> bool:
        return self.cursor is None


@dataclass(frozen=True)
class Annotation:
    """A completed judge record; selection sets satisfy the nesting chain."""

    doc_id: str
    judge_id: str
    paragraph_selections: Mapping[int, frozenset[int]]
    section_selections: Mapping[int, frozenset[int]]
    document_selection: frozenset[int]
    short_selection: frozenset[int]
    defective: frozenset[int]
    completed_at: datetime


# --- stage ordering ------------------------------------------------------------

def stage_sequence(doc: Document) -> list[StageId]:
    """All stages of a document in submission order."""
    stages: list[StageId] = []
    for sec in doc.sections:
        for p in doc.section_paragraphs(sec.index):
            stages.append(StageId(StageKind.PARAGRAPH, section_index=sec.index, paragraph_index=p))
        stages.append(StageId(StageKind.SECTION, section_index=sec.index))
    stages.append(StageId(StageKind.DOCUMENT))
    stages.append(StageId(StageKind.SHORT))
    return stages


def stage_number(doc: Document, stage: StageId) -> tuple[int, int]:
    """1-based position of ``stage`` in the walk, plus the total stage count."""
    seq = stage_sequence(doc)
    return seq.index(stage) + 1, len(seq)


def _next_stage(doc: Document, stage: StageId) -> StageId | None:
    seq = stage_sequence(doc)
    i = seq.index(stage)
    return seq[i + 1] if i + 1 < len(seq) else None


# --- operations ----------------------------------------------------------------

def start_session(
    doc: Document,
    judge_id: str,
    config: SessionConfig = SessionConfig(),
    session_id: str | None = None,
) -> AnnotationSession:
    """Open a session positioned at the first paragraph of the first section."""
    if doc.sentence_count == 0:
        raise EmptyDocument(f"document {doc.doc_id!r} has no sentences")
    del config  # validated at construction; submissions re-check per stage
    return AnnotationSession(
        session_id=session_id or uuid.uuid4().hex,
        doc_id=doc.doc_id,
        judge_id=judge_id,
        cursor=stage_sequence(doc)[0],
    )


def candidates(session: AnnotationSession, doc: Document) -> list[int]:
    """Sentence indices selectable at the session's current stage, in document order.

    Paragraph stages offer the whole paragraph; every later stage offers the
    union of the previous stage's selections.  Defective sentences never
    reappear after the stage where they were marked.
    """
    stage = session.cursor
    if stage is None:
        raise SessionCompleted(f"session {session.session_id} is completed")
    if stage.kind is StageKind.PARAGRAPH:
        return list(doc.paragraph_sentences(stage.paragraph_index))
    if stage.kind is StageKind.SECTION:
        pool: set[int] = set()
        for p in doc.section_paragraphs(stage.section_index):
            pool |= session.paragraph_selections.get(p, frozenset())
        return sorted(pool)
    if stage.kind is StageKind.DOCUMENT:
        pool = set()
        for sel in session.section_selections.values():
            pool |= sel
        return sorted(pool)
    return sorted(session.document_selection)


def stage_requirement(session: AnnotationSession, stage: StageId,
                      n_candidates: int, config: SessionConfig) -> tuple[int, bool]:
    """(required, exact) for a stage given its candidate count."""
    if stage.kind is StageKind.PARAGRAPH:
        return min(config.min_paragraph_selections, n_candidates), False
    if stage.kind is StageKind.SECTION:
        return min(config.min_section_selections, n_candidates), False
    if stage.kind is StageKind.DOCUMENT:
        return min(1, n_candidates), False
    return min(config.short_summary_size, len(session.document_selection)), True


def submit_stage(
    session: AnnotationSession,
    doc: Document,
    selected: Iterable[int],
    newly_defective: Iterable[int] = (),
    config: SessionConfig = SessionConfig(),
) -> AnnotationSession:
    """Record a stage's selections and advance the cursor.

    Selections must come from the candidate set, defective marks are only
    accepted at paragraph stages, and the per-stage minimum (exact size, for
    the short stage) is enforced after defective sentences are discounted.
    """
    stage = session.cursor
    if stage is None:
        raise SessionCompleted(f"session {session.session_id} is completed")
    selected = frozenset(selected)
    newly_defective = frozenset(newly_defective)

    cand = candidates(session, doc)
    cand_set = set(cand)

    if newly_defective and stage.kind is not StageKind.PARAGRAPH:
        raise DefectiveOutsideParagraphStage(
            f"defective marks are not allowed at stage {stage}")
    for idx in sorted(newly_defective):
        if idx not in cand_set:
            raise NotACandidate(idx)
    selectable = cand_set - newly_defective
    for idx in sorted(selected):
        if idx not in selectable:
            raise NotACandidate(idx)

    required, exact = stage_requirement(session, stage, len(selectable), config)
    if len(selected) < required or (exact and len(selected) != required):
        raise BelowMinimum(stage, required, len(selected), exact=exact)

    updates: dict = {"cursor": _next_stage(doc, stage)}
    if stage.kind is StageKind.PARAGRAPH:
        updates["paragraph_selections"] = {
            **session.paragraph_selections, stage.paragraph_index: selected}
        updates["defective"] = session.defective | newly_defective
    elif stage.kind is StageKind.SECTION:
        updates["section_selections"] = {
            **session.section_selections, stage.section_index: selected}
    elif stage.kind is StageKind.DOCUMENT:
        updates["document_selection"] = selected
    else:
        updates["short_selection"] = selected
    return replace(session, **updates)


def finalize(
    session: AnnotationSession,
    doc: Document,
    config: SessionConfig = SessionConfig(),
    completed_at: datetime | None = None,
) -> Annotation:
    """Turn a completed session into an Annotation, re-verifying every invariant.

    ``completed_at`` is injectable so that log replay reproduces identical
    records; it defaults to the current UTC time.
    """
    if not session.is_completed:
        raise SessionIncomplete(session.cursor)
    annotation = Annotation(
        doc_id=session.doc_id,
        judge_id=session.judge_id,
        paragraph_selections=dict(session.paragraph_selections),
        section_selections=dict(session.section_selections),
        document_selection=session.document_selection,
        short_selection=session.short_selection,
        defective=session.defective,
        completed_at=completed_at or datetime.now(timezone.utc),
    )
    validate_annotation(annotation, doc, config)
    return annotation


def validate_annotation(annotation: Annotation, doc: Document,
                        config: SessionConfig = SessionConfig()) -> None:
    """Verify the nesting chain and every other Annotation invariant."""
    n = doc.sentence_count
    para_union: set[int] = set()
    sec_union: set[int] = set()

    all_seled = [
        *annotation.paragraph_selections.values(),
        *annotation.section_selections.values(),
        annotation.document_selection,
        annotation.short_selection,
    ]
    for sel in all_seled:
        for idx in sel:
            if not 0 <= idx < n:
                raise InvariantViolation("valid indices", f"sentence {idx} outside 0..{n - 1}")
        if sel & annotation.defective:
            raise InvariantViolation(
                "defective excluded", "a defective sentence appears in a selection set")

    if set(annotation.paragraph_selections) != set(range(len(doc.paragraphs))):
        raise InvariantViolation("paragraph coverage", "missing or extra paragraph entries")
    if set(annotation.section_selections) != set(range(len(doc.sections))):
        raise InvariantViolation("section coverage", "missing or extra section entries")

    for p, sel in annotation.paragraph_selections.items():
        members = set(doc.paragraph_sentences(p))
        if not sel <= members:
            raise InvariantViolation(
                "paragraph membership", f"paragraph {p} selection leaves its sentence range")
        non_defective = len(members - set(annotation.defective))
        required = min(config.min_paragraph_selections, non_defective)
        if len(sel) < required:
            raise InvariantViolation(
                "paragraph minimum",
                f"paragraph {p} has {len(sel)} selections, needs {required}")
        para_union |= sel

    for s, sel in annotation.section_selections.items():
        pool: set[int] = set()
        for p in doc.section_paragraphs(s):
            pool |= annotation.paragraph_selections.get(p, frozenset())
        if not sel <= pool:
            raise InvariantViolation(
                "section containment",
                f"section {s} selects outside its paragraph selections")
        sec_union |= sel

    if not annotation.document_selection <= sec_union:
        raise InvariantViolation("nesting", "document selection not within section selections")
    if not annotation.short_selection <= annotation.document_selection:
        raise InvariantViolation("nesting", "short selection not within document selection")
    if not sec_union <= para_union:
        raise InvariantViolation("nesting", "section selections not within paragraph selections")

    expected_short = min(config.short_summary_size, len(annotation.document_selection))
    if len(annotation.short_selection) != expected_short:
        raise InvariantViolation(
            "short size",
            f"short summary has {len(annotation.short_selection)} sentences, "
            f"expected {expected_short}")


# --- JSON ----------------------------------------------------------------------

def annotation_to_json(annotation: Annotation) -> dict:
    return {
        "doc_id": annotation.doc_id,
        "judge_id": annotation.judge_id,
        "defective": sorted(annotation.defective),
        "paragraph": {
            str(p): sorted(sel)
            for p, sel in sorted(annotation.paragraph_selections.items())
        },
        "section": {
            str(s): sorted(sel)
            for s, sel in sorted(annotation.section_selections.items())
        },
        "document": sorted(annotation.document_selection),
        "short": sorted(annotation.short_selection),
        "completed_at": annotation.completed_at.isoformat(),
    }


def _int_list(data: dict, fieldname: str, path: str) -> frozenset[int]:
    if fieldname not in data:
        raise SchemaViolation(path, f"missing field {path!r}")
    value = data[fieldname]
    if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SchemaViolation(path, f"{path!r} must be a list of integers")
    return frozenset(value)


def _selection_map(data: dict, fieldname: str) -> dict[int, frozenset[int]]:
    if fieldname not in data:
        raise SchemaViolation(fieldname, f"missing field {fieldname!r}")
    value = data[fieldname]
    if not isinstance(value, dict):
        raise SchemaViolation(fieldname, f"{fieldname!r} must be an object")
    out: dict[int, frozenset[int]] = {}
    for key in value:
        try:
            idx = int(key)
        except ValueError:
            raise SchemaViolation(f"{fieldname}.{key}", f"key {key!r} is not an integer")
        out[idx] = _int_list(value, key, f"{fieldname}.{key}")
    return out


def annotation_from_json(data: object) -> Annotation:
    if not isinstance(data, dict):
        raise SchemaViolation("", "annotation payload must be an object")
    for fieldname in ("doc_id", "judge_id", "completed_at"):
        if fieldname not in data or not isinstance(data[fieldname], str):
            raise SchemaViolation(fieldname, f"{fieldname!r} must be a string")
    try:
        completed_at = datetime.fromisoformat(data["completed_at"])
    except ValueError:
        raise SchemaViolation("completed_at", "completed_at is not an RFC3339 timestamp")
    return Annotation(
        doc_id=data["doc_id"],
        judge_id=data["judge_id"],
        paragraph_selections=_selection_map(data, "paragraph"),
        section_selections=_selection_map(data, "section"),
        document_selection=_int_list(data, "document", "document"),
        short_selection=_int_list(data, "short", "short"),
        defective=_int_list(data, "defective", "defective"),
        completed_at=completed_at,
    )
