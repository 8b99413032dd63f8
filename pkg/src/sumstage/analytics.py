"""Corpus statistics over completed annotations.

The central object is the per-judge utility level of a sentence: 0 when never
selected, then 1..4 for the deepest stage that kept it (paragraph, section,
document, short).  Because selections nest, "selected at stage k" is exactly
"level >= k", which is what the judge-count table, filtration ratios and
threshold counts all exploit.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import AbstractSet, Collection, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document
from .errors import (
    DegenerateData,
    EmptyCorpus,
    MixedDocuments,
)
from .session import Annotation, StageKind

STAGES = ("paragraph", "section", "document", "short")

Z_95 = 1.96


# --- utility levels -----------------------------------------------------------

def sentence_levels(annotation: Annotation, n_sentences: int) -> list[int]:
    """Graded score per sentence: 4 short, 3 document, 2 section, 1 paragraph, 0 none."""
    levels = [0] * n_sentences
    for sel in annotation.paragraph_selections.values():
        for i in sel:
            levels[i] = 1
    for sel in annotation.section_selections.values():
        for i in sel:
            levels[i] = 2
    for i in annotation.document_selection:
        levels[i] = 3
    for i in annotation.short_selection:
        levels[i] = 4
    return levels


def level_matrix(annotations: Sequence[Annotation], n_sentences: int) -> list[list[int]]:
    """Judge-by-sentence level matrix for a single document (judges sorted by id)."""
    _require_single_doc(annotations)
    ordered = sorted(annotations, key=lambda a: a.judge_id)
    return [sentence_levels(a, n_sentences) for a in ordered]


def _require_single_doc(annotations: Sequence[Annotation]) -> None:
    doc_ids = {a.doc_id for a in annotations}
    if len(doc_ids) > 1:
        raise MixedDocuments(f"annotations span documents {sorted(doc_ids)}")


def _stage_sets(annotation: Annotation) -> dict[str, frozenset[int]]:
    para: set[int] = set()
    for sel in annotation.paragraph_selections.values():
        para |= sel
    sec: set[int] = set()
    for sel in annotation.section_selections.values():
        sec |= sel
    return {
        "paragraph": frozenset(para),
        "section": frozenset(sec),
        "document": frozenset(annotation.document_selection),
        "short": frozenset(annotation.short_selection),
    }


# --- judge-count table ----------------------------------------------------------

def judge_count_table(annotations: Sequence[Annotation], n_sentences: int) -> list[tuple[int, int, int, int]]:
    """Per sentence, how many judges kept it at each of the four stages.

    Rows are non-increasing left to right because selections nest.
    """
    _require_single_doc(annotations)
    counts = [[0, 0, 0, 0] for _ in range(n_sentences)]
    for a in annotations:
        sets = _stage_sets(a)
        for col, stage in enumerate(STAGES):
            for i in sets[stage]:
                counts[i][col] += 1
    return [tuple(row) for row in counts]


def threshold_salience(annotations: Sequence[Annotation], k: int) -> dict[str, frozenset[int]]:
    """Sentences of one document selected by at least ``k`` judges, per stage."""
    _require_single_doc(annotations)
    if k < 1:
        raise ValueError("k must be >= 1")
    per_stage: dict[str, Counter] = {stage: Counter() for stage in STAGES}
    for a in annotations:
        sets = _stage_sets(a)
        for stage in STAGES:
            per_stage[stage].update(sets[stage])
    return {
        stage: frozenset(i for i, c in per_stage[stage].items() if c >= k)
        for stage in STAGES
    }


# --- positional distribution -----------------------------------------------------

def position_bin(index: int, n_sentences: int, n_bins: int = 10) -> int:
    """Equal-size binning of a sentence position: floor(index * n_bins / N)."""
    return index * n_bins // n_sentences


@dataclass(frozen=True)
class BinDistribution:
    fractions: tuple[float, ...]
    n_selections: int  # zero flags "no document-level selections anywhere"


def positional_bins(
    annotations: Iterable[Annotation],
    sentence_counts: Mapping[str, int],
    n_bins: int = 10,
) -> BinDistribution:
    """Fraction of document-level selections landing in each positional bin."""
    counts = [0] * n_bins
    total = 0
    for a in annotations:
        n = sentence_counts[a.doc_id]
        for i in a.document_selection:
            counts[position_bin(i, n, n_bins)] += 1
            total += 1
    if total == 0:
        return BinDistribution(fractions=tuple(0.0 for _ in range(n_bins)), n_selections=0)
    return BinDistribution(
        fractions=tuple(c / total for c in counts),
        n_selections=total,
    )


# --- filtration -------------------------------------------------------------------

_FILTRATION_PAIRS = (
    ("paragraph", "section"),
    ("paragraph", "document"),
    ("paragraph", "short"),
    ("section", "document"),
    ("section", "short"),
    ("document", "short"),
)


@dataclass(frozen=True)
class FiltrationTable:
    """Survival ratios between stages, pooled over all judge-document pairs.

    Pooling (micro-averaging) makes the chain identities exact:
    paragraph->document = paragraph->section * section->document, etc.
    Ratios are None when the source stage has no selections at all.
    """

    paragraph_to_section: float | None
    paragraph_to_document: float | None
    paragraph_to_short: float | None
    section_to_document: float | None
    section_to_short: float | None
    document_to_short: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {
            f"{a}_to_{b}": getattr(self, f"{a}_to_{b}")
            for a, b in _FILTRATION_PAIRS
        }


def filtration(annotations: Iterable[Annotation]) -> FiltrationTable:
    totals = {stage: 0 for stage in STAGES}
    for a in annotations:
        sets = _stage_sets(a)
        for stage in STAGES:
            totals[stage] += len(sets[stage])

    def ratio(src: str, dst: str) -> float | None:
        return totals[dst] / totals[src] if totals[src] else None

    return FiltrationTable(**{
        f"{a}_to_{b}": ratio(a, b) for a, b in _FILTRATION_PAIRS
    })


# --- corpus shape statistics --------------------------------------------------------

@dataclass(frozen=True)
class StatSummary:
    mean: float
    ci95: float | None  # half-width; None when n < 2
    n: int


def _summarize(values: Sequence[float]) -> StatSummary:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if arr.size < 2:
        return StatSummary(mean=mean, ci95=None, n=int(arr.size))
    sd = float(arr.std(ddof=1))
    return StatSummary(mean=mean, ci95=Z_95 * sd / float(np.sqrt(arr.size)), n=int(arr.size))


def partition_stats(docs: Sequence[Document]) -> dict[str, StatSummary]:
    """Mean and 95% CI of sections/doc, paragraphs/doc and sentences per unit."""
    if not docs:
        raise EmptyCorpus("no documents")
    sections_per_doc = [len(d.sections) for d in docs]
    paragraphs_per_doc = [len(d.paragraphs) for d in docs]
    sentences_per_section = [
        len(d.section_sentences(s.index)) for d in docs for s in d.sections]
    sentences_per_paragraph = [
        p.sentence_range[1] - p.sentence_range[0] for d in docs for p in d.paragraphs]
    return {
        "sections_per_doc": _summarize(sections_per_doc),
        "paragraphs_per_doc": _summarize(paragraphs_per_doc),
        "sentences_per_section": _summarize(sentences_per_section),
        "sentences_per_paragraph": _summarize(sentences_per_paragraph),
    }


# --- Krippendorff's alpha -------------------------------------------------------------

def _difference_matrix(categories: Sequence[float], marginals: np.ndarray, metric: str) -> np.ndarray:
    k = len(categories)
    delta2 = np.zeros((k, k))
    if metric == "nominal":
        delta2 = 1.0 - np.eye(k)
    elif metric == "interval":
        vals = np.asarray(categories, dtype=float)
        delta2 = (vals[:, None] - vals[None, :]) ** 2
    elif metric == "ordinal":
        # cumulative-margin distance: sum of frequencies spanned by the two
        # categories, with the endpoints counted half
        for i in range(k):
            for j in range(i + 1, k):
                span = marginals[i:j + 1].sum() - (marginals[i] + marginals[j]) / 2.0
                delta2[i, j] = delta2[j, i] = span ** 2
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return delta2


def krippendorff_alpha(
    ratings: Sequence[Sequence[int | float | None]],
    metric: str = "ordinal",
) -> float:
    """Inter-rater reliability over a raters-by-items matrix.

    ``None`` cells are missing ratings; items with fewer than two ratings are
    excluded pairwise.  Raises DegenerateData when no item has two ratings or
    when expected disagreement is zero (every rating identical).
    """
    if len(ratings) < 2:
        raise DegenerateData("need at least 2 raters")
    n_items = max((len(r) for r in ratings), default=0)
    units: list[list[float]] = []
    for col in range(n_items):
        vals = [row[col] for row in ratings if col < len(row) and row[col] is not None]
        if len(vals) >= 2:
            units.append([float(v) for v in vals])
    if not units:
        raise DegenerateData("no item carries two or more ratings")

    pooled = [v for unit in units for v in unit]
    categories = sorted(set(pooled))
    index = {c: i for i, c in enumerate(categories)}
    marginals = np.zeros(len(categories))
    for v in pooled:
        marginals[index[v]] += 1
    n = marginals.sum()

    delta2 = _difference_matrix(categories, marginals, metric)

    observed = 0.0
    for unit in units:
        counts = np.zeros(len(categories))
        for v in unit:
            counts[index[v]] += 1
        observed += counts @ delta2 @ counts / (len(unit) - 1)
    observed /= n

    expected = marginals @ delta2 @ marginals / (n * (n - 1))
    if expected == 0.0:
        raise DegenerateData("all ratings identical; alpha undefined")
    return float(1.0 - observed / expected)


# --- Cohen's kappa ---------------------------------------------------------------------

def cohen_kappa(
    panel_a_selected: AbstractSet[Hashable],
    panel_b_selected: AbstractSet[Hashable],
    universe: Collection[Hashable],
) -> float:
    """Chance-corrected agreement of two binary selected/not-selected labelings."""
    items = set(universe)
    if not items:
        raise ValueError("universe must be non-empty")
    if not (set(panel_a_selected) <= items and set(panel_b_selected) <= items):
        raise ValueError("panel selections must be subsets of the universe")
    n = len(items)
    a_yes = len(panel_a_selected)
    b_yes = len(panel_b_selected)
    agree = sum(1 for i in items if (i in panel_a_selected) == (i in panel_b_selected))
    po = agree / n
    pe = (a_yes / n) * (b_yes / n) + ((n - a_yes) / n) * ((n - b_yes) / n)
    if pe == 1.0:
        raise DegenerateData("expected agreement is 1; kappa undefined")
    return (po - pe) / (1.0 - pe)


def panel_selection(
    annotations: Iterable[Annotation],
    judges: AbstractSet[str],
    min_judges: int = 2,
) -> set[tuple[str, int]]:
    """Document-level selections a judge panel agrees on.

    A (doc_id, sentence) item counts as panel-selected when at least
    ``min_judges`` panel members kept it in their document summary.
    """
    votes: Counter = Counter()
    for a in annotations:
        if a.judge_id in judges:
            for i in a.document_selection:
                votes[(a.doc_id, i)] += 1
    return {item for item, c in votes.items() if c >= min_judges}


def two_panel_kappa(
    annotations: Sequence[Annotation],
    panel_a: AbstractSet[str],
    panel_b: AbstractSet[str],
    sentence_counts: Mapping[str, int],
    min_judges: int = 2,
) -> float:
    """Kappa between two judge panels' majority document summaries.

    Only documents annotated by at least ``min_judges`` members of each panel
    enter the universe; the universe is every sentence of those documents.
    """
    per_doc_judges: dict[str, dict[str, set[str]]] = {}
    for a in annotations:
        entry = per_doc_judges.setdefault(a.doc_id, {"a": set(), "b": set()})
        if a.judge_id in panel_a:
            entry["a"].add(a.judge_id)
        if a.judge_id in panel_b:
            entry["b"].add(a.judge_id)
    shared_docs = {
        doc_id for doc_id, entry in per_doc_judges.items()
        if len(entry["a"]) >= min_judges and len(entry["b"]) >= min_judges
    }
    if not shared_docs:
        raise DegenerateData("no document annotated by both panels")
    pool = [a for a in annotations if a.doc_id in shared_docs]
    universe = {
        (doc_id, i) for doc_id in shared_docs for i in range(sentence_counts[doc_id])}
    sel_a = panel_selection(pool, panel_a, min_judges)
    sel_b = panel_selection(pool, panel_b, min_judges)
    return cohen_kappa(sel_a, sel_b, universe)


# --- agreement report --------------------------------------------------------------------

@dataclass(frozen=True)
class AgreementReport:
    krippendorff_alpha: float | None
    kappa: float | None
    n_judges: int
    n_items: int


def pooled_level_matrix(
    annotations: Sequence[Annotation],
    sentence_counts: Mapping[str, int],
) -> tuple[list[str], list[list[int | None]]]:
    """Judges-by-items level matrix pooled over documents.

    Items are (doc_id, sentence) pairs; a judge's row is None for documents
    they did not annotate.
    """
    judges = sorted({a.judge_id for a in annotations})
    doc_ids = sorted({a.doc_id for a in annotations})
    by_pair = {(a.judge_id, a.doc_id): a for a in annotations}
    matrix: list[list[int | None]] = []
    for judge in judges:
        row: list[int | None] = []
        for doc_id in doc_ids:
            a = by_pair.get((judge, doc_id))
            if a is None:
                row.extend([None] * sentence_counts[doc_id])
            else:
                row.extend(sentence_levels(a, sentence_counts[doc_id]))
        matrix.append(row)
    return judges, matrix


def agreement_report(
    annotations: Sequence[Annotation],
    sentence_counts: Mapping[str, int],
    panel_a: AbstractSet[str] | None = None,
    panel_b: AbstractSet[str] | None = None,
    min_judges: int = 2,
) -> AgreementReport:
    """Alpha over the whole pool, plus two-panel kappa when panels are given.

    Degenerate inputs yield None coefficients rather than an error.
    """
    judges, matrix = pooled_level_matrix(annotations, sentence_counts)
    try:
        alpha = krippendorff_alpha(matrix, metric="ordinal")
    except DegenerateData:
        alpha = None
    kappa = None
    if panel_a is not None and panel_b is not None:
        try:
            kappa = two_panel_kappa(
                annotations, panel_a, panel_b, sentence_counts, min_judges)
        except DegenerateData:
            kappa = None
    n_items = len(matrix[0]) if matrix else 0
    return AgreementReport(
        krippendorff_alpha=alpha, kappa=kappa, n_judges=len(judges), n_items=n_items)


# re-exported for callers that reason about stage depth
STAGE_LEVELS = {kind.value: kind.level for kind in StageKind}
