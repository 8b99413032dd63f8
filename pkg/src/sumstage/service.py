"""Multi-judge orchestration over an append-only event log.

All mutable state (tasks, sessions, completed annotations) is derived from two
durable inputs: the corpus directory and the event log.  Every mutation is
validated first, appended to the log, and only then applied in memory and
acknowledged, so replaying the log after a crash reconstructs the exact state
seen at every past acknowledgment.

Judge registration is not session-scoped, so it lives in a small sidecar JSON
file next to the log rather than in the log itself.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from .corpus import Document, document_from_json, store_document
from .errors import (
    DocumentMismatch,
    DuplicateDocument,
    OwnershipViolation,
    SessionCompleted,
    UnknownDocument,
    UnknownJudge,
    UnknownSession,
)
from .jsonio import line_dumps, read_json, read_jsonl, write_json
from .reports import eval_report, full_report, partition_counts
from .session import (
    Annotation,
    AnnotationSession,
    SessionConfig,
    StageId,
    annotation_to_json,
    candidates,
    finalize,
    stage_number,
    stage_requirement,
    start_session,
    submit_stage,
)

EVENT_TYPES = ("SessionStarted", "StageSubmitted", "SessionCompleted", "SessionAbandoned")


@dataclass(frozen=True)
class ServiceConfig:
    required_judges: int = 5
    gold_pass_threshold: float = 0.5
    # every Nth completion per judge triggers a gold re-check; None checks every
    # completion of a document that has a gold annotation
    gold_recheck_every: int | None = None
    session: SessionConfig = field(default_factory=SessionConfig)


@dataclass
class Task:
    doc_id: str
    required_judges: int
    completed_judges: set[str] = field(default_factory=set)

    @property
    def status(self) -> str:
        return "complete" if len(self.completed_judges) >= self.required_judges else "open"


@dataclass(frozen=True)
class GoldResult:
    judge_id: str
    doc_id: str
    f1: float
    passed: bool


def set_f1(candidate: frozenset[int] | set[int], gold: frozenset[int] | set[int]) -> float:
    """F1 of two index sets; identical empties count as perfect agreement."""
    if not candidate and not gold:
        return 1.0
    if not candidate or not gold:
        return 0.0
    overlap = len(set(candidate) & set(gold))
    precision = overlap / len(candidate)
    recall = overlap / len(gold)
    return 2 * precision * recall / (precision + recall) if overlap else 0.0


def gold_score(candidate: Annotation, gold: Annotation, threshold: float = 0.5) -> GoldResult:
    """Qualification score: document-level selection F1 against a gold annotation."""
    if candidate.doc_id != gold.doc_id:
        raise DocumentMismatch(
            f"candidate is for {candidate.doc_id!r}, gold for {gold.doc_id!r}")
    f1 = set_f1(candidate.document_selection, gold.document_selection)
    return GoldResult(
        judge_id=candidate.judge_id,
        doc_id=candidate.doc_id,
        f1=f1,
        passed=f1 >= threshold,
    )


@dataclass(frozen=True)
class EventRecord:
    seq: int
    ts: str
    session_id: str
    type: str
    body: dict

    def as_dict(self) -> dict:
        return {"seq": self.seq, "ts": self.ts, "session_id": self.session_id,
                "type": self.type, "body": self.body}


class AnnotationService:
    """In-memory orchestration state rebuilt from corpus dir + event log."""

    def __init__(
        self,
        corpus_dir: str | Path,
        log_path: str | Path,
        config: ServiceConfig = ServiceConfig(),
        judges_path: str | Path | None = None,
        clock: Callable[[], datetime] | None = None,
    ):
        self.corpus_dir = Path(corpus_dir)
        self.corpus_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = Path(log_path)
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        self.judges_path = Path(judges_path) if judges_path else self.log_path.parent / "judges.json"
        self.config = config
        self.clock = clock or (lambda: datetime.now(timezone.utc))

        self._lock = threading.RLock()
        self._seq = 0
        self.docs: dict[str, Document] = {}
        self.judges: set[str] = set()
        self.tasks: dict[str, Task] = {}
        self.sessions: dict[str, AnnotationSession] = {}
        self.session_configs: dict[str, SessionConfig] = {}
        self.completed_sessions: dict[str, AnnotationSession] = {}
        self.annotations: dict[str, dict[str, Annotation]] = {}
        self.gold_annotations: dict[str, Annotation] = {}
        self.gold_results: list[GoldResult] = []
        self._completions_per_judge: dict[str, int] = {}
        self._last_submit: dict[str, tuple[str, dict]] = {}  # session -> (token, response)

        from .corpus import load_corpus_dir
        for doc_id, doc in load_corpus_dir(self.corpus_dir).items():
            self.docs[doc_id] = doc
            self.tasks[doc_id] = Task(doc_id, self.config.required_judges)
        if self.judges_path.exists():
            self.judges = set(read_json(self.judges_path))
        if self.log_path.exists():
            for record in read_jsonl(self.log_path):
                self._apply(EventRecord(**record))
                self._seq = record["seq"]
        self._log_fh = open(self.log_path, "a", encoding="utf-8")

    # --- event log -------------------------------------------------------------

    def _append(self, type_: str, session_id: str, body: dict) -> EventRecord:
        self._seq += 1
        record = EventRecord(
            seq=self._seq,
            ts=self.clock().isoformat(),
            session_id=session_id,
            type=type_,
            body=body,
        )
        self._log_fh.write(line_dumps(record.as_dict()) + "\n")
        self._log_fh.flush()
        return record

    def _apply(self, record: EventRecord) -> None:
        """Replay one event against in-memory state (no validation, no logging)."""
        if record.type == "SessionStarted":
            body = record.body
            config = SessionConfig(**body["config"])
            doc = self.docs[body["doc_id"]]
            session = start_session(doc, body["judge_id"], config,
                                    session_id=record.session_id)
            self.sessions[record.session_id] = session
            self.session_configs[record.session_id] = config
        elif record.type == "StageSubmitted":
            session = self.sessions[record.session_id]
            config = self.session_configs[record.session_id]
            doc = self.docs[session.doc_id]
            self.sessions[record.session_id] = submit_stage(
                session, doc,
                record.body["selected"], record.body["defective"], config)
        elif record.type == "SessionCompleted":
            session = self.sessions.pop(record.session_id)
            config = self.session_configs.pop(record.session_id)
            self.completed_sessions[record.session_id] = session
            doc = self.docs[session.doc_id]
            annotation = finalize(
                session, doc, config,
                completed_at=datetime.fromisoformat(record.ts))
            self.annotations.setdefault(session.doc_id, {})[session.judge_id] = annotation
            self.tasks[session.doc_id].completed_judges.add(session.judge_id)
            self.judges.add(session.judge_id)
            self._record_completion(annotation)
        elif record.type == "SessionAbandoned":
            self.sessions.pop(record.session_id, None)
            self.session_configs.pop(record.session_id, None)
        else:
            raise ValueError(f"unknown event type {record.type!r}")

    def _record_completion(self, annotation: Annotation) -> None:
        judge = annotation.judge_id
        self._completions_per_judge[judge] = self._completions_per_judge.get(judge, 0) + 1
        gold = self.gold_annotations.get(annotation.doc_id)
        if gold is None:
            return
        every = self.config.gold_recheck_every
        if every is None or self._completions_per_judge[judge] % every == 0:
            self.gold_results.append(
                gold_score(annotation, gold, self.config.gold_pass_threshold))

    # --- document & judge management --------------------------------------------

    def add_document(self, payload: dict | Document) -> str:
        with self._lock:
            doc = payload if isinstance(payload, Document) else document_from_json(payload)
            if doc.doc_id in self.docs:
                raise DuplicateDocument(f"document {doc.doc_id!r} already ingested")
            store_document(doc, self.corpus_dir / f"{doc.doc_id}.json")
            self.docs[doc.doc_id] = doc
            self.tasks[doc.doc_id] = Task(doc.doc_id, self.config.required_judges)
            return doc.doc_id

    def register_judge(self, judge_id: str) -> None:
        if not judge_id:
            raise ValueError("judge_id must be non-empty")
        with self._lock:
            self.judges.add(judge_id)
            write_json(self.judges_path, sorted(self.judges))

    def register_gold(self, annotation: Annotation) -> None:
        with self._lock:
            if annotation.doc_id not in self.docs:
                raise UnknownDocument(annotation.doc_id)
            self.gold_annotations[annotation.doc_id] = annotation

    # --- task assignment ----------------------------------------------------------

    def next_task(self, judge_id: str) -> tuple[str, AnnotationSession] | None:
        """Assign the least-annotated open task the judge has not touched.

        Returns None when no work is available.  The session start is logged
        before it becomes visible.
        """
        with self._lock:
            if judge_id not in self.judges:
                raise UnknownJudge(judge_id)
            active_docs = {s.doc_id for s in self.sessions.values() if s.judge_id == judge_id}
            candidates_ = [
                t for t in self.tasks.values()
                if t.status == "open"
                and judge_id not in t.completed_judges
                and t.doc_id not in active_docs
            ]
            if not candidates_:
                return None
            task = min(candidates_, key=lambda t: (len(t.completed_judges), t.doc_id))
            doc = self.docs[task.doc_id]
            session = start_session(doc, judge_id, self.config.session,
                                    session_id=uuid.uuid4().hex)
            self._append("SessionStarted", session.session_id, {
                "doc_id": doc.doc_id,
                "judge_id": judge_id,
                "config": {
                    "min_paragraph_selections": self.config.session.min_paragraph_selections,
                    "min_section_selections": self.config.session.min_section_selections,
                    "short_summary_size": self.config.session.short_summary_size,
                },
            })
            self.sessions[session.session_id] = session
            self.session_configs[session.session_id] = self.config.session
            return doc.doc_id, session

    def _get_session(self, session_id: str) -> AnnotationSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            if session_id in self.completed_sessions:
                raise SessionCompleted(f"session {session_id} is completed")
            raise UnknownSession(session_id)

    def _check_owner(self, session: AnnotationSession, judge_id: str) -> None:
        if session.judge_id != judge_id:
            raise OwnershipViolation(
                f"session {session.session_id} belongs to {session.judge_id!r}")

    # --- annotation flow ------------------------------------------------------------

    def submit(
        self,
        session_id: str,
        judge_id: str,
        selected: Iterable[int],
        newly_defective: Iterable[int] = (),
        token: str | None = None,
    ) -> dict:
        """Validate, log, then apply one stage submission.

        A repeated call with the same idempotency token returns the original
        response without appending a second event.
        """
        with self._lock:
            if token is not None and session_id in self._last_submit:
                last_token, last_response = self._last_submit[session_id]
                if token == last_token:
                    return last_response
            session = self._get_session(session_id)
            self._check_owner(session, judge_id)
            config = self.session_configs[session_id]
            doc = self.docs[session.doc_id]

            updated = submit_stage(session, doc, selected, newly_defective, config)

            stage = session.cursor
            self._append("StageSubmitted", session_id, {
                "stage": _stage_payload(stage),
                "selected": sorted(set(selected)),
                "defective": sorted(set(newly_defective)),
            })
            self.sessions[session_id] = updated

            if updated.is_completed:
                record = self._append("SessionCompleted", session_id, {})
                del self.sessions[session_id]
                del self.session_configs[session_id]
                self.completed_sessions[session_id] = updated
                annotation = finalize(updated, doc, config,
                                      completed_at=datetime.fromisoformat(record.ts))
                self.annotations.setdefault(doc.doc_id, {})[judge_id] = annotation
                self.tasks[doc.doc_id].completed_judges.add(judge_id)
                self._record_completion(annotation)
                response = {"status": "completed",
                            "session": self.session_view_of(updated, config)}
            else:
                response = {"status": "advanced",
                            "session": self.session_view_of(updated, config)}
            if token is not None:
                self._last_submit[session_id] = (token, response)
            return response

    def abandon(self, session_id: str, judge_id: str) -> None:
        with self._lock:
            session = self._get_session(session_id)
            self._check_owner(session, judge_id)
            self._append("SessionAbandoned", session_id, {})
            del self.sessions[session_id]
            del self.session_configs[session_id]
            self._last_submit.pop(session_id, None)

    # --- views ------------------------------------------------------------------------

    def session_view(self, session_id: str) -> dict:
        with self._lock:
            if session_id in self.completed_sessions:
                session = self.completed_sessions[session_id]
                return self.session_view_of(session, self.config.session)
            session = self._get_session(session_id)
            return self.session_view_of(session, self.session_configs[session_id])

    def session_view_of(self, session: AnnotationSession, config: SessionConfig) -> dict:
        """The judge-facing state of a session: stage, candidates, requirements."""
        doc = self.docs[session.doc_id]
        view: dict = {
            "session_id": session.session_id,
            "doc_id": session.doc_id,
            "judge_id": session.judge_id,
            "completed": session.is_completed,
            "defective": sorted(session.defective),
            "selections": {
                "paragraph": {str(p): sorted(sel)
                              for p, sel in sorted(session.paragraph_selections.items())},
                "section": {str(s): sorted(sel)
                            for s, sel in sorted(session.section_selections.items())},
                "document": sorted(session.document_selection),
                "short": sorted(session.short_selection),
            },
        }
        if session.is_completed:
            view["stage"] = None
            view["candidates"] = []
            view["requirement"] = None
            annotation = self.annotations.get(session.doc_id, {}).get(session.judge_id)
            view["annotation"] = annotation_to_json(annotation) if annotation else None
            return view

        stage = session.cursor
        cands = candidates(session, doc)
        number, total = stage_number(doc, stage)
        required, exact = stage_requirement(session, stage, len(cands), config)
        view["stage"] = {**_stage_payload(stage), "number": number, "total": total}
        view["candidates"] = [
            {"index": i, "text": doc.sentences[i].text} for i in cands]
        view["requirement"] = {"min": required, "exact": required if exact else None}
        return view

    def annotations_for(self, doc_id: str) -> list[Annotation]:
        with self._lock:
            if doc_id not in self.docs:
                raise UnknownDocument(doc_id)
            per_judge = self.annotations.get(doc_id, {})
            return [per_judge[j] for j in sorted(per_judge)]

    def all_annotations(self, partition: str | None = None) -> list[Annotation]:
        out = []
        for doc_id in sorted(self.annotations):
            if partition and self.docs[doc_id].partition != partition:
                continue
            per_judge = self.annotations[doc_id]
            out.extend(per_judge[j] for j in sorted(per_judge))
        return out

    # --- exports & reports ----------------------------------------------------------

    def export_dataset(self, partition: str | None = None,
                       include_incomplete: bool = False) -> dict:
        """Bundle documents, completed annotations and per-partition counts.

        By default only documents whose task is complete are included.
        """
        with self._lock:
            docs = []
            for doc_id in sorted(self.docs):
                doc = self.docs[doc_id]
                if partition and doc.partition != partition:
                    continue
                if not include_incomplete and self.tasks[doc_id].status != "complete":
                    continue
                docs.append(doc)
            included = {d.doc_id for d in docs}
            annotations = [a for a in self.all_annotations(partition)
                           if a.doc_id in included]
            from .corpus import document_to_json
            return {
                "partition": partition,
                "counts": partition_counts(docs),
                "documents": [document_to_json(d) for d in docs],
                "annotations": [annotation_to_json(a) for a in annotations],
            }

    def distribution_report(self, partition: str | None = None,
                            n_bins: int = 10) -> dict:
        with self._lock:
            docs = [d for d in self.docs.values()
                    if partition is None or d.partition == partition]
            return full_report(docs, self.all_annotations(partition), n_bins=n_bins)

    def agreement_view(self, partition: str | None = None,
                       panel_a: set[str] | None = None,
                       panel_b: set[str] | None = None) -> dict:
        from .analytics import agreement_report
        with self._lock:
            annotations = self.all_annotations(partition)
            sentence_counts = {d.doc_id: d.sentence_count for d in self.docs.values()}
            report = agreement_report(annotations, sentence_counts, panel_a, panel_b)
            return {
                "alpha": report.krippendorff_alpha,
                "kappa": report.kappa,
                "n_judges": report.n_judges,
                "n_items": report.n_items,
            }

    def eval_view(self, partition: str | None = None) -> dict:
        with self._lock:
            docs = {d.doc_id: d for d in self.docs.values()
                    if partition is None or d.partition == partition}
            table, _ = eval_report(docs, self.all_annotations(partition))
            return table

    def close(self) -> None:
        self._log_fh.close()


def _stage_payload(stage: StageId) -> dict:
    return {
        "kind": stage.kind.value,
        "section": stage.section_index,
        "paragraph": stage.paragraph_index,
    }
