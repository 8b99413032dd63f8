from __future__ import annotations

import random

from sumstage.analytics import filtration, positional_bins
from sumstage.session import SessionConfig, annotation_to_json, validate_annotation
from sumstage.simulate import (
    JudgeBehavior,
    simulate_annotation,
    simulate_judges,
    synthetic_corpus,
    synthetic_document,
)


def test_synthetic_document_is_valid():
    rng = random.Random(0)
    doc = synthetic_document("d", rng, n_sentences=30)
    assert doc.sentence_count == 30
    assert doc.paragraphs[-1].sentence_range[1] == 30


def test_synthetic_corpus_deterministic():
    c1 = synthetic_corpus(5, seed=3)
    c2 = synthetic_corpus(5, seed=3)
    assert c1 == c2
    assert synthetic_corpus(5, seed=4) != c1


def test_simulated_annotations_are_valid():
    docs = synthetic_corpus(4, seed=1)
    anns = simulate_judges(docs, 3, JudgeBehavior(0.5, 0.5, 0.5), seed=9)
    assert len(anns) == 12
    by_id = {d.doc_id: d for d in docs}
    for a in anns:
        validate_annotation(a, by_id[a.doc_id])


def test_fixed_seed_identical_output():
    docs = synthetic_corpus(3, seed=2)
    behavior = JudgeBehavior(0.6, 0.6, 0.6, positional_bias=0.8)
    a1 = simulate_judges(docs, 2, behavior, seed=5)
    a2 = simulate_judges(docs, 2, behavior, seed=5)
    assert [annotation_to_json(a) for a in a1] == [annotation_to_json(a) for a in a2]


def test_keep_everything_keeps_everything():
    docs = synthetic_corpus(3, seed=7)
    anns = simulate_judges(docs, 2, JudgeBehavior(1.0, 1.0, 1.0), seed=1)
    table = filtration(anns)
    assert table.paragraph_to_section == 1.0
    assert table.section_to_document == 1.0
    assert table.document_to_short < 1.0  # exact-3 short clamp


def test_positional_bias_concentrates_early():
    docs = synthetic_corpus(30, seed=11, sentence_range=(40, 56))
    biased = simulate_judges(docs, 3, JudgeBehavior(0.8, 0.8, 0.8, positional_bias=0.7), seed=2)
    counts = {d.doc_id: d.sentence_count for d in docs}
    dist = positional_bins(biased, counts)
    assert dist.fractions[0] == max(dist.fractions)
    assert dist.fractions[0] > 0.3


def test_single_annotation_meets_minimums():
    rng = random.Random(4)
    doc = synthetic_document("d", rng, n_sentences=20)
    config = SessionConfig(min_paragraph_selections=2, min_section_selections=2)
    ann = simulate_annotation(doc, "j", JudgeBehavior(0.1, 0.1, 0.1), rng, config)
    validate_annotation(ann, doc, config)
    for p, sel in ann.paragraph_selections.items():
        members = doc.paragraph_sentences(p)
        assert len(sel) >= min(2, len(members))
