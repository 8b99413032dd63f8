"""Multi-reference ROUGE scoring of extractive summaries.

Candidates and references are sentence-index lists resolved against the
document text, so every system is tokenized identically: lowercase, split on
non-alphanumeric characters, no stemming, no stopword removal.  Per-reference
scores aggregate by maximum F (the mean is carried alongside for reporting).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .corpus import Document
from .errors import InvalidSentenceIndex, TooFewJudges, UnknownDocument
from .jsonio import read_jsonl
from .session import Annotation

TokenSeq = tuple[str, ...]

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")

METRIC_NAMES = ("rouge1", "rouge2", "rougeL")


def tokenize(text: str) -> TokenSeq:
    return tuple(t for t in _TOKEN_SPLIT.split(text.lower()) if t)


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @staticmethod
    def from_pr(precision: float, recall: float) -> "RougeScore":
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        return RougeScore(precision=precision, recall=recall, f1=f1)

    def as_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


_ZERO = RougeScore(0.0, 0.0, 0.0)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap; zeros when either side is shorter than n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(candidate) < n or len(reference) < n:
        return _ZERO
    cand_counts = _ngrams(candidate, n)
    ref_counts = _ngrams(reference, n)
    overlap = sum((cand_counts & ref_counts).values())
    return RougeScore.from_pr(
        precision=overlap / sum(cand_counts.values()),
        recall=overlap / sum(ref_counts.values()),
    )


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Longest-common-subsequence overlap over flat token sequences."""
    if not candidate or not reference:
        return _ZERO
    lcs = _lcs_length(candidate, reference)
    return RougeScore.from_pr(precision=lcs / len(candidate), recall=lcs / len(reference))


def rouge1(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    return rouge_n(candidate, reference, 1)


def rouge2(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    return rouge_n(candidate, reference, 2)


METRICS: dict[str, Callable[[Sequence[str], Sequence[str]], RougeScore]] = {
    "rouge1": rouge1,
    "rouge2": rouge2,
    "rougeL": rouge_l,
}


def _metric_fn(metric: str | Callable) -> Callable[[Sequence[str], Sequence[str]], RougeScore]:
    if callable(metric):
        return metric
    try:
        return METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")


@dataclass(frozen=True)
class MultiRefScore:
    best: RougeScore  # the reference with maximum F
    mean: RougeScore  # component-wise mean over references


def multi_ref(
    candidate: Sequence[str],
    references: Sequence[Sequence[str]],
    metric: str | Callable = "rouge1",
) -> MultiRefScore:
    """Score a candidate against every reference; keep the max-F one."""
    if not references:
        raise ValueError("references must be non-empty")
    fn = _metric_fn(metric)
    scores = [fn(candidate, ref) for ref in references]
    best = max(scores, key=lambda s: s.f1)
    mean = RougeScore(
        precision=sum(s.precision for s in scores) / len(scores),
        recall=sum(s.recall for s in scores) / len(scores),
        f1=sum(s.f1 for s in scores) / len(scores),
    )
    return MultiRefScore(best=best, mean=mean)


def _mean_scores(scores: Sequence[RougeScore]) -> RougeScore:
    if not scores:
        return _ZERO
    return RougeScore(
        precision=sum(s.precision for s in scores) / len(scores),
        recall=sum(s.recall for s in scores) / len(scores),
        f1=sum(s.f1 for s in scores) / len(scores),
    )


# --- summaries from documents ----------------------------------------------------

def summary_tokens(doc: Document, sentence_indices: Iterable[int]) -> TokenSeq:
    """Token sequence of the selected sentences, in document order."""
    tokens: list[str] = []
    for i in sorted(set(sentence_indices)):
        if not 0 <= i < doc.sentence_count:
            raise InvalidSentenceIndex(doc.doc_id, i)
        tokens.extend(tokenize(doc.sentences[i].text))
    return tuple(tokens)


def reference_summaries(doc: Document, annotations: Sequence[Annotation]) -> list[TokenSeq]:
    """One reference per judge: their document-level summary."""
    return [summary_tokens(doc, a.document_selection) for a in annotations]


def lead3(doc: Document) -> list[int]:
    """First min(3, N) sentence indices."""
    return list(range(min(3, doc.sentence_count)))


# --- corpus-level evaluation --------------------------------------------------------

def oracle_jackknife(
    docs: Mapping[str, Document],
    annotations_by_doc: Mapping[str, Sequence[Annotation]],
    metric: str | Callable = "rouge1",
) -> RougeScore:
    """Upper-bound score: each judge summary scored against the others' summaries.

    Per document, every judge in turn plays the candidate and is scored against
    the remaining references (max-F aggregation); judge scores average into a
    document score and document scores average into the corpus score.
    """
    doc_scores: list[RougeScore] = []
    for doc_id in sorted(annotations_by_doc):
        anns = list(annotations_by_doc[doc_id])
        if len(anns) < 2:
            raise TooFewJudges(f"document {doc_id!r} has {len(anns)} annotations, need >= 2")
        doc = docs[doc_id]
        summaries = reference_summaries(doc, anns)
        judge_scores = []
        for j, candidate in enumerate(summaries):
            others = summaries[:j] + summaries[j + 1:]
            judge_scores.append(multi_ref(candidate, others, metric).best)
        doc_scores.append(_mean_scores(judge_scores))
    return _mean_scores(doc_scores)


def load_system_summaries(path: str | Path) -> dict[str, list[int]]:
    """Read a system-summary file: one {"doc_id", "sentences"} object per line."""
    summaries: dict[str, list[int]] = {}
    for obj in read_jsonl(path):
        summaries[str(obj["doc_id"])] = [int(i) for i in obj["sentences"]]
    return summaries


@dataclass(frozen=True)
class SystemResult:
    scores: dict[str, RougeScore]  # metric name -> corpus-level score
    per_doc: list[dict]  # rows for the CSV breakdown
    n_docs: int


def evaluate_system(
    docs: Mapping[str, Document],
    annotations_by_doc: Mapping[str, Sequence[Annotation]],
    system_summaries: Mapping[str, Sequence[int]],
    metrics: Sequence[str] = METRIC_NAMES,
) -> SystemResult:
    """Corpus-level multi-reference ROUGE of one system.

    The corpus score is the mean over documents of the per-document max-F
    scores.  Documents without any reference annotation are skipped.
    """
    per_metric: dict[str, list[RougeScore]] = {m: [] for m in metrics}
    per_doc_rows: list[dict] = []
    n_docs = 0
    for doc_id in sorted(system_summaries):
        if doc_id not in docs:
            raise UnknownDocument(f"system summary references unknown document {doc_id!r}")
        anns = list(annotations_by_doc.get(doc_id, ()))
        if not anns:
            continue
        doc = docs[doc_id]
        candidate = summary_tokens(doc, system_summaries[doc_id])
        references = reference_summaries(doc, anns)
        n_docs += 1
        for m in metrics:
            result = multi_ref(candidate, references, m)
            per_metric[m].append(result.best)
            per_doc_rows.append({
                "doc_id": doc_id,
                "metric": m,
                "precision": result.best.precision,
                "recall": result.best.recall,
                "f1": result.best.f1,
                "mean_f1": result.mean.f1,
            })
    return SystemResult(
        scores={m: _mean_scores(per_metric[m]) for m in metrics},
        per_doc=per_doc_rows,
        n_docs=n_docs,
    )
