"""Shared fixture builders: the worked-example documents and random session walks."""

from __future__ import annotations

import random

from sumstage.corpus import Document, Paragraph, Section, Sentence, validate_document
from sumstage.session import (
    Annotation,
    SessionConfig,
    StageKind,
    candidates,
    finalize,
    start_session,
    submit_stage,
)

# Twelve sentences in two sections of two three-sentence paragraphs each.
# The walkthrough selections live in WALKTHROUGH_* below.
WALKTHROUGH_RAW = """\
Overview

The team builds document tools. Employees need awareness of new products. A suite of applications delivers training.

Microsoft IT manages a large infrastructure environment. It consists of many employees worldwide. The services group supports customers and partners.

Details

Employees remain informed about products in their expertise areas. The readiness team ensures staff have required tools. Training reaches staff through several channels.

Adoption grew across regions last year. Feedback from the field shaped the curriculum. The next release focuses on search quality.
"""

# the worked walkthrough, 0-based sentence indices
WALKTHROUGH_PARAGRAPHS = {0: {1, 2}, 1: {3, 5}, 2: {6, 7}, 3: {10}}
WALKTHROUGH_SECTIONS = {0: {2, 3, 5}, 1: {6, 7, 10}}
WALKTHROUGH_DOCUMENT = {2, 3, 6, 10}
WALKTHROUGH_SHORT = {2, 3, 6}


def flat_document(doc_id: str, n_sentences: int, para_ranges, sec_ranges,
                  partition: str = "unassigned") -> Document:
    """Build a document with synthetic sentence texts and explicit structure."""
    sentences = []
    pos = 0
    for i in range(n_sentences):
        text = f"Sentence {i} mentions topic {i % 7} and topic {i % 5}."
        sentences.append(Sentence(index=i, text=text, char_span=(pos, pos + len(text))))
        pos += len(text) + 1
    doc = Document(
        doc_id=doc_id,
        sentences=tuple(sentences),
        paragraphs=tuple(Paragraph(index=i, sentence_range=r) for i, r in enumerate(para_ranges)),
        sections=tuple(Section(index=i, paragraph_range=r) for i, r in enumerate(sec_ranges)),
        partition=partition,
    )
    validate_document(doc)
    return doc


def judge_pool_document() -> Document:
    """Eight sentences, one paragraph, one section."""
    return flat_document("pool-doc", 8, [(0, 8)], [(0, 1)])


# per-judge stage selections reproducing the five-judge count table
# (rows per sentence: paragraph 0,2,4,5,0,3,1,4 / section 0,2,4,4,0,1,0,3 /
#  document 0,2,4,2,0,1,0,2 / short 0,2,3,2,0,1,0,2)
JUDGE_POOL_PLANS = {
    "judge-a": {"para": {2, 3, 5, 7}, "sec": {2, 3, 5, 7}, "doc": {2, 3, 5, 7}, "short": {3, 5, 7}},
    "judge-b": {"para": {1, 2, 3, 5, 7}, "sec": {1, 2, 3, 7}, "doc": {1, 2, 7}, "short": {1, 2, 7}},
    "judge-c": {"para": {2, 3, 5}, "sec": {2, 3}, "doc": {2, 3}, "short": {2, 3}},
    "judge-d": {"para": {2, 3, 6, 7}, "sec": {2, 3, 7}, "doc": {2}, "short": {2}},
    "judge-e": {"para": {1, 3, 7}, "sec": {1}, "doc": {1}, "short": {1}},
}

JUDGE_POOL_EXPECTED_COUNTS = [
    (0, 0, 0, 0),
    (2, 2, 2, 2),
    (4, 4, 4, 3),
    (5, 4, 2, 2),
    (0, 0, 0, 0),
    (3, 1, 1, 1),
    (1, 0, 0, 0),
    (4, 3, 2, 2),
]


def walk_single_screen(doc: Document, judge_id: str, para: set, sec: set,
                       doc_sel: set, short: set,
                       config: SessionConfig = SessionConfig()) -> Annotation:
    """Complete a session on a one-paragraph, one-section document."""
    session = start_session(doc, judge_id, config)
    for selected in (para, sec, doc_sel, short):
        session = submit_stage(session, doc, selected, (), config)
    return finalize(session, doc, config)


def walk_plan(doc: Document, judge_id: str,
              para_sel: dict[int, set], sec_sel: dict[int, set],
              doc_sel: set, short_sel: set,
              config: SessionConfig = SessionConfig()) -> Annotation:
    """Complete a session following a prepared per-stage selection plan."""
    session = start_session(doc, judge_id, config)
    while not session.is_completed:
        stage = session.cursor
        if stage.kind is StageKind.PARAGRAPH:
            selected = para_sel[stage.paragraph_index]
        elif stage.kind is StageKind.SECTION:
            selected = sec_sel[stage.section_index]
        elif stage.kind is StageKind.DOCUMENT:
            selected = doc_sel
        else:
            selected = short_sel
        session = submit_stage(session, doc, selected, (), config)
    return finalize(session, doc, config)


def judge_pool_annotations() -> list[Annotation]:
    doc = judge_pool_document()
    return [
        walk_single_screen(doc, judge, sel["para"], sel["sec"], sel["doc"], sel["short"])
        for judge, sel in JUDGE_POOL_PLANS.items()
    ]


# --- random documents and walks -----------------------------------------------

def random_document(rng: random.Random, doc_id: str = "rand",
                    max_sentences: int = 18) -> Document:
    n = rng.randint(1, max_sentences)
    para_ranges = []
    start = 0
    while start < n:
        size = min(rng.randint(1, 6), n - start)
        para_ranges.append((start, start + size))
        start += size
    sec_ranges = []
    start = 0
    while start < len(para_ranges):
        size = min(rng.randint(1, 3), len(para_ranges) - start)
        sec_ranges.append((start, start + size))
        start += size
    return flat_document(doc_id, n, para_ranges, sec_ranges)


def random_walk(doc: Document, rng: random.Random, judge_id: str = "walker",
                config: SessionConfig = SessionConfig(),
                defect_prob: float = 0.15):
    """Drive a session with random valid selections and random defective marks.

    Returns the completed (unfinalized) session.
    """
    session = start_session(doc, judge_id, config)
    while not session.is_completed:
        stage = session.cursor
        cands = candidates(session, doc)
        if stage.kind is StageKind.PARAGRAPH:
            defective = {i for i in cands if rng.random() < defect_prob}
            if len(defective) == len(cands) and rng.random() < 0.5:
                defective.discard(rng.choice(sorted(defective)))
            pool = [i for i in cands if i not in defective]
            required = min(config.min_paragraph_selections, len(pool))
        else:
            defective = set()
            pool = list(cands)
            if stage.kind is StageKind.SECTION:
                required = min(config.min_section_selections, len(pool))
            elif stage.kind is StageKind.DOCUMENT:
                required = min(1, len(pool))
            else:
                required = min(config.short_summary_size, len(session.document_selection))
        if stage.kind is StageKind.SHORT:
            selected = set(rng.sample(pool, required))
        else:
            size = rng.randint(required, len(pool)) if pool else 0
            selected = set(rng.sample(pool, size))
        session = submit_stage(session, doc, selected, defective, config)
    return session
