"""Synthetic documents and scripted judges.

The judge model is deliberately simple and clearly synthetic: independent
Bernoulli keep decisions per candidate at each stage, optionally damped by a
geometric positional factor so early sentences survive more often.  Every
annotation is produced by driving the real session machine, so nesting holds
by construction.  A fixed seed yields byte-identical output, including
timestamps, which run on a simulated clock.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Sequence

from .corpus import Document, Paragraph, Section, Sentence, validate_document
from .session import (
    Annotation,
    AnnotationSession,
    SessionConfig,
    StageKind,
    candidates,
    finalize,
    start_session,
    submit_stage,
)

_SIM_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

_TOPICS = (
    "routing", "storage", "billing", "search", "caching", "auditing", "queueing",
    "indexing", "backup", "metrics", "alerts", "planning", "training", "review",
    "rollout", "capacity", "latency", "budget", "staffing", "tooling",
)

_TEMPLATES = (
    "The {a} team reviewed the {b} pipeline in detail.",
    "Changes to {a} reduced load on the {b} service.",
    "A report on {a} was shared with the {b} group.",
    "Improvements in {a} depend on stable {b} behavior.",
    "The {a} rollout finished ahead of the {b} milestone.",
    "Costs for {a} stayed below the {b} forecast.",
)


@dataclass(frozen=True)
class JudgeBehavior:
    """Per-stage keep probabilities plus a positional damping factor.

    ``positional_bias`` multiplies the keep probability by bias**tenth, where
    tenth is the sentence's decile position in the document; 1.0 disables it.
    """

    paragraph_keep: float = 1.0
    section_keep: float = 1.0
    document_keep: float = 1.0
    positional_bias: float = 1.0

    def keep_probability(self, kind: StageKind, index: int, n_sentences: int) -> float:
        base = {
            StageKind.PARAGRAPH: self.paragraph_keep,
            StageKind.SECTION: self.section_keep,
            StageKind.DOCUMENT: self.document_keep,
        }[kind]
        if self.positional_bias >= 1.0 or n_sentences == 0:
            return base
        tenth = index * 10 // n_sentences
        return base * self.positional_bias ** tenth


# --- synthetic corpus ------------------------------------------------------------

def synthetic_document(
    doc_id: str,
    rng: random.Random,
    n_sentences: int | None = None,
    partition: str = "unassigned",
) -> Document:
    """Generate a structured document with varied, overlapping sentence texts."""
    if n_sentences is None:
        n_sentences = rng.randint(12, 60)
    sentences = []
    pos = 0
    for i in range(n_sentences):
        text = rng.choice(_TEMPLATES).format(a=rng.choice(_TOPICS), b=rng.choice(_TOPICS))
        sentences.append(Sentence(index=i, text=text, char_span=(pos, pos + len(text))))
        pos += len(text) + 1

    para_ranges = []
    start = 0
    while start < n_sentences:
        size = min(rng.randint(3, 8), n_sentences - start)
        para_ranges.append((start, start + size))
        start += size
    paragraphs = [Paragraph(index=i, sentence_range=r) for i, r in enumerate(para_ranges)]

    sec_ranges = []
    start = 0
    while start < len(paragraphs):
        size = min(rng.randint(2, 4), len(paragraphs) - start)
        sec_ranges.append((start, start + size))
        start += size
    sections = [
        Section(index=i, paragraph_range=r, header=f"Part {i + 1}")
        for i, r in enumerate(sec_ranges)
    ]

    doc = Document(
        doc_id=doc_id,
        sentences=tuple(sentences),
        paragraphs=tuple(paragraphs),
        sections=tuple(sections),
        partition=partition,
    )
    validate_document(doc)
    return doc


def synthetic_corpus(
    n_docs: int,
    seed: int,
    sentence_range: tuple[int, int] = (12, 60),
    partition: str = "unassigned",
) -> list[Document]:
    rng = random.Random(seed)
    return [
        synthetic_document(
            f"doc-{i:04d}", rng,
            n_sentences=rng.randint(*sentence_range),
            partition=partition,
        )
        for i in range(n_docs)
    ]


# --- scripted judges --------------------------------------------------------------

def _weighted_pick(pool: list[int], weights: list[float], rng: random.Random) -> int:
    total = sum(weights)
    if total <= 0:
        return rng.choice(pool)
    return rng.choices(pool, weights=weights, k=1)[0]


def _choose(
    session: AnnotationSession,
    doc: Document,
    behavior: JudgeBehavior,
    rng: random.Random,
    required: int,
) -> list[int]:
    stage = session.cursor
    cands = candidates(session, doc)
    n = doc.sentence_count
    if stage.kind is StageKind.SHORT:
        return sorted(rng.sample(cands, required))
    kept = [i for i in cands
            if rng.random() < behavior.keep_probability(stage.kind, i, n)]
    remaining = [i for i in cands if i not in kept]
    while len(kept) < required and remaining:
        weights = [behavior.keep_probability(stage.kind, i, n) for i in remaining]
        pick = _weighted_pick(remaining, weights, rng)
        kept.append(pick)
        remaining.remove(pick)
    return sorted(kept)


def _required(session: AnnotationSession, doc: Document, config: SessionConfig) -> int:
    stage = session.cursor
    n_cands = len(candidates(session, doc))
    if stage.kind is StageKind.PARAGRAPH:
        return min(config.min_paragraph_selections, n_cands)
    if stage.kind is StageKind.SECTION:
        return min(config.min_section_selections, n_cands)
    if stage.kind is StageKind.DOCUMENT:
        return min(1, n_cands)
    return min(config.short_summary_size, len(session.document_selection))


def simulate_annotation(
    doc: Document,
    judge_id: str,
    behavior: JudgeBehavior,
    rng: random.Random,
    config: SessionConfig = SessionConfig(),
    completed_at: datetime | None = None,
) -> Annotation:
    """Walk one full session with Bernoulli selections; always completes."""
    session = start_session(doc, judge_id, config)
    while not session.is_completed:
        required = _required(session, doc, config)
        selected = _choose(session, doc, behavior, rng, required)
        session = submit_stage(session, doc, selected, (), config)
    return finalize(session, doc, config,
                    completed_at=completed_at or _SIM_EPOCH)


def simulate_judges(
    docs: Sequence[Document],
    n_judges: int,
    behavior: JudgeBehavior,
    seed: int,
    config: SessionConfig = SessionConfig(),
) -> list[Annotation]:
    """Annotate every document with ``n_judges`` synthetic judges, deterministically."""
    rng = random.Random(seed)
    annotations = []
    tick = 0
    for doc in sorted(docs, key=lambda d: d.doc_id):
        for j in range(n_judges):
            annotations.append(simulate_annotation(
                doc, f"sim-{j + 1}", behavior, rng, config,
                completed_at=_SIM_EPOCH + timedelta(minutes=tick),
            ))
            tick += 1
    return annotations
