from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumstage.errors import InvalidSentenceIndex, TooFewJudges, UnknownDocument
from sumstage.evaluation import (
    METRIC_NAMES,
    RougeScore,
    evaluate_system,
    lead3,
    load_system_summaries,
    multi_ref,
    oracle_jackknife,
    reference_summaries,
    rouge_l,
    rouge_n,
    summary_tokens,
    tokenize,
)
from sumstage.corpus import Document, Paragraph, Section, Sentence

from helpers import flat_document, walk_single_screen
from oracles import rouge_l_oracle, rouge_n_oracle


# --- tokenize -------------------------------------------------------------------

def test_tokenize_lowercase_alnum_split():
    assert tokenize("The SMSG-Readiness team, v2.0!") == (
        "the", "smsg", "readiness", "team", "v2", "0")


def test_tokenize_empty():
    assert tokenize("...  !!") == ()


# --- rouge_n --------------------------------------------------------------------

def test_rouge_n_identity():
    tokens = tokenize("a quick brown fox jumps")
    for n in (1, 2):
        score = rouge_n(tokens, tokens, n)
        assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)


def test_rouge_n_disjoint():
    a, b = tokenize("alpha bravo charlie"), tokenize("delta echo foxtrot")
    for n in (1, 2):
        assert rouge_n(a, b, n) == RougeScore(0.0, 0.0, 0.0)


def test_rouge_2_hand_count():
    score = rouge_n(("a", "b", "c"), ("a", "b", "d"), 2)
    assert score == RougeScore(0.5, 0.5, 0.5)


def test_rouge_n_too_short_gives_zeros():
    assert rouge_n(("a",), ("a", "b"), 2) == RougeScore(0.0, 0.0, 0.0)
    assert rouge_n((), ("a",), 1) == RougeScore(0.0, 0.0, 0.0)


def test_rouge_n_clipping():
    # "a" appears twice in the candidate but once in the reference
    score = rouge_n(("a", "a"), ("a", "b"), 1)
    assert score.precision == 0.5
    assert score.recall == 0.5


# --- rouge_l ---------------------------------------------------------------------

def test_rouge_l_identity():
    tokens = tokenize("the whole sequence matches")
    assert rouge_l(tokens, tokens) == RougeScore(1.0, 1.0, 1.0)


def test_rouge_l_hand_lcs():
    score = rouge_l(("a", "c", "b"), ("a", "b", "c"))
    assert score.precision == pytest.approx(2 / 3)
    assert score.recall == pytest.approx(2 / 3)


def test_rouge_l_empty_candidate():
    assert rouge_l((), ("a", "b")) == RougeScore(0.0, 0.0, 0.0)


# --- oracle equivalence ------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_rouge_matches_brute_force(seed):
    rng = random.Random(seed)
    vocab = [f"w{i}" for i in range(8)]
    cand = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 30)))
    ref = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 30)))
    for n in (1, 2):
        mine = rouge_n(cand, ref, n)
        assert (mine.precision, mine.recall, mine.f1) == rouge_n_oracle(cand, ref, n)
    mine = rouge_l(cand, ref)
    assert (mine.precision, mine.recall, mine.f1) == rouge_l_oracle(cand, ref)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_rouge_symmetry_and_bounds(seed):
    rng = random.Random(seed)
    vocab = [f"w{i}" for i in range(6)]
    a = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 20)))
    b = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 20)))
    for fn in (lambda x, y: rouge_n(x, y, 1), lambda x, y: rouge_n(x, y, 2), rouge_l):
        ab, ba = fn(a, b), fn(b, a)
        assert ab.precision == ba.recall and ab.recall == ba.precision
        for value in (ab.precision, ab.recall, ab.f1):
            assert 0.0 <= value <= 1.0
        if ab.precision == 0.0 and ab.recall == 0.0:
            assert ab.f1 == 0.0


# --- multi_ref ------------------------------------------------------------------------

def test_multi_ref_exact_match_wins():
    refs = [tokenize("alpha bravo"), tokenize("charlie delta"), tokenize("echo fox")]
    result = multi_ref(tokenize("charlie delta"), refs, "rouge1")
    assert result.best.f1 == 1.0


def test_multi_ref_single_reference_equals_direct():
    cand, ref = tokenize("a b c"), tokenize("a b d")
    result = multi_ref(cand, [ref], "rouge2")
    assert result.best == rouge_n(cand, ref, 2)
    assert result.mean == result.best


def test_multi_ref_max_and_mean():
    # references built so they score F=0.4 and F=0.6 against the candidate
    cand = ("a", "b", "c", "d", "e")
    ref_04 = ("a", "b", "x", "y", "z")
    ref_06 = ("a", "b", "c", "u", "v")
    assert rouge_n(cand, ref_04, 1).f1 == pytest.approx(0.4)
    assert rouge_n(cand, ref_06, 1).f1 == pytest.approx(0.6)
    result = multi_ref(cand, [ref_04, ref_06], "rouge1")
    assert result.best.f1 == pytest.approx(0.6)
    assert result.mean.f1 == pytest.approx(0.5)


def test_multi_ref_adding_reference_never_lowers_max():
    rng = random.Random(11)
    vocab = [f"w{i}" for i in range(5)]
    cand = tuple(rng.choice(vocab) for _ in range(10))
    refs = [tuple(rng.choice(vocab) for _ in range(8)) for _ in range(4)]
    best = 0.0
    for k in range(1, 5):
        result = multi_ref(cand, refs[:k], "rouge1")
        assert result.best.f1 >= best - 1e-15
        assert all(result.best.f1 >= rouge_n(cand, r, 1).f1 for r in refs[:k])
        best = result.best.f1


def test_multi_ref_empty_references_rejected():
    with pytest.raises(ValueError):
        multi_ref(("a",), [], "rouge1")


# --- lead3 ------------------------------------------------------------------------------

def test_lead3_long_doc():
    doc = flat_document("d", 10, [(0, 5), (5, 10)], [(0, 2)])
    assert lead3(doc) == [0, 1, 2]


def test_lead3_short_doc():
    doc = flat_document("d", 2, [(0, 2)], [(0, 1)])
    assert lead3(doc) == [0, 1]


def test_lead3_differs_from_judges_who_skip_openers():
    # judges who all skip the opening boilerplate score lead-3 below 1
    doc = flat_document("d", 8, [(0, 8)], [(0, 1)])
    anns = [walk_single_screen(doc, f"j{i}", {1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3})
            for i in range(3)]
    refs = reference_summaries(doc, anns)
    cand = summary_tokens(doc, lead3(doc))
    assert multi_ref(cand, refs, "rouge1").best.f1 < 1.0


# --- summary construction -----------------------------------------------------------------

def test_summary_tokens_document_order():
    doc = flat_document("d", 4, [(0, 4)], [(0, 1)])
    assert summary_tokens(doc, [2, 0]) == tokenize(
        doc.sentences[0].text + " " + doc.sentences[2].text)


def test_summary_tokens_invalid_index():
    doc = flat_document("d", 4, [(0, 4)], [(0, 1)])
    with pytest.raises(InvalidSentenceIndex):
        summary_tokens(doc, [5])


# --- oracle jackknife ----------------------------------------------------------------------

def jackknife_fixture():
    texts = ["Alpha bravo here.", "Charlie delta here.", "Echo foxtrot now.", "Golf hotel now."]
    sentences, pos = [], 0
    for i, t in enumerate(texts):
        sentences.append(Sentence(index=i, text=t, char_span=(pos, pos + len(t))))
        pos += len(t) + 1
    return Document(
        doc_id="jk",
        sentences=tuple(sentences),
        paragraphs=(Paragraph(index=0, sentence_range=(0, 4)),),
        sections=(Section(index=0, paragraph_range=(0, 1)),),
    )


def test_jackknife_identical_judges():
    doc = jackknife_fixture()
    anns = [walk_single_screen(doc, f"j{i}", {0, 1}, {0, 1}, {0, 1}, {0, 1})
            for i in range(3)]
    score = oracle_jackknife({"jk": doc}, {"jk": anns}, "rouge1")
    assert score.f1 == 1.0


def test_jackknife_two_disjoint_judges():
    doc = jackknife_fixture()
    a = walk_single_screen(doc, "a", {0, 1}, {0, 1}, {0, 1}, {0, 1})
    b = walk_single_screen(doc, "b", {2, 3}, {2, 3}, {2, 3}, {2, 3})
    score = oracle_jackknife({"jk": doc}, {"jk": [a, b]}, "rouge1")
    assert score.f1 == 0.0


def test_jackknife_two_identical_one_disjoint_is_two_thirds():
    doc = jackknife_fixture()
    a = walk_single_screen(doc, "a", {0, 1}, {0, 1}, {0, 1}, {0, 1})
    b = walk_single_screen(doc, "b", {0, 1}, {0, 1}, {0, 1}, {0, 1})
    c = walk_single_screen(doc, "c", {2, 3}, {2, 3}, {2, 3}, {2, 3})
    score = oracle_jackknife({"jk": doc}, {"jk": [a, b, c]}, "rouge1")
    assert score.f1 == pytest.approx(2 / 3)


def test_jackknife_requires_two_judges():
    doc = jackknife_fixture()
    a = walk_single_screen(doc, "a", {0, 1}, {0, 1}, {0, 1}, {0, 1})
    with pytest.raises(TooFewJudges):
        oracle_jackknife({"jk": doc}, {"jk": [a]}, "rouge1")


# --- evaluate_system --------------------------------------------------------------------------

def small_corpus():
    docs, anns = {}, {}
    for d in range(3):
        doc = flat_document(f"d{d}", 8, [(0, 8)], [(0, 1)])
        docs[doc.doc_id] = doc
        sel = {d, d + 1, d + 2}
        anns[doc.doc_id] = [
            walk_single_screen(doc, f"j{j}", sel | {5}, sel | {5}, sel, sel)
            for j in range(2)
        ]
    return docs, anns


def test_system_copying_a_judge_scores_one():
    docs, anns = small_corpus()
    system = {d: sorted(anns[d][0].document_selection) for d in docs}
    result = evaluate_system(docs, anns, system)
    for metric in METRIC_NAMES:
        assert result.scores[metric].f1 == 1.0
    assert result.n_docs == 3


def test_empty_summaries_score_zero():
    docs, anns = small_corpus()
    system = {d: [] for d in docs}
    result = evaluate_system(docs, anns, system)
    for metric in METRIC_NAMES:
        assert result.scores[metric] == RougeScore(0.0, 0.0, 0.0)


def test_unknown_document_rejected():
    docs, anns = small_corpus()
    with pytest.raises(UnknownDocument):
        evaluate_system(docs, anns, {"missing": [0]})


def test_invalid_sentence_index_rejected():
    docs, anns = small_corpus()
    with pytest.raises(InvalidSentenceIndex):
        evaluate_system(docs, anns, {"d0": [99]})


def test_docs_without_references_are_skipped():
    docs, anns = small_corpus()
    del anns["d2"]
    result = evaluate_system(docs, anns, {d: [0, 1, 2] for d in docs})
    assert result.n_docs == 2


def test_load_system_summaries(tmp_path):
    path = tmp_path / "system.jsonl"
    path.write_text('{"doc_id": "a", "sentences": [0, 2]}\n{"doc_id": "b", "sentences": []}\n')
    assert load_system_summaries(path) == {"a": [0, 2], "b": []}
