"""Report assembly: the JSON report schema and the CSV table exports."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import AbstractSet, Mapping, Sequence

from .analytics import (
    STAGES,
    AgreementReport,
    agreement_report,
    filtration,
    judge_count_table,
    partition_stats,
    positional_bins,
    threshold_salience,
)
from .corpus import Document
from .evaluation import (
    METRIC_NAMES,
    SystemResult,
    evaluate_system,
    lead3,
    oracle_jackknife,
)
from .session import Annotation

DEFAULT_KS = (1, 2, 3)


def group_by_doc(annotations: Sequence[Annotation]) -> dict[str, list[Annotation]]:
    grouped: dict[str, list[Annotation]] = {}
    for a in annotations:
        grouped.setdefault(a.doc_id, []).append(a)
    for anns in grouped.values():
        anns.sort(key=lambda a: a.judge_id)
    return grouped


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def threshold_summary(
    annotations: Sequence[Annotation],
    ks: Sequence[int] = DEFAULT_KS,
) -> dict[str, dict[str, float]]:
    """Mean per-document count of sentences selected by >= k judges, per stage."""
    grouped = group_by_doc(annotations)
    out: dict[str, dict[str, float]] = {}
    for k in ks:
        per_stage: dict[str, list[float]] = {stage: [] for stage in STAGES}
        for anns in grouped.values():
            sets = threshold_salience(anns, k)
            for stage in STAGES:
                per_stage[stage].append(len(sets[stage]))
        out[str(k)] = {stage: _mean(per_stage[stage]) for stage in STAGES}
    return out


def distribution_report(
    docs: Sequence[Document],
    annotations: Sequence[Annotation],
    n_bins: int = 10,
    ks: Sequence[int] = DEFAULT_KS,
) -> dict:
    stats = partition_stats(docs)
    sentence_counts = {d.doc_id: d.sentence_count for d in docs}
    bins = positional_bins(annotations, sentence_counts, n_bins)
    return {
        "partition_stats": {
            name: {"mean": s.mean, "ci95": s.ci95, "n": s.n}
            for name, s in stats.items()
        },
        "bins": list(bins.fractions),
        "filtration": filtration(annotations).as_dict(),
        "threshold": threshold_summary(annotations, ks),
    }


def full_report(
    docs: Sequence[Document],
    annotations: Sequence[Annotation],
    n_bins: int = 10,
    ks: Sequence[int] = DEFAULT_KS,
    panel_a: AbstractSet[str] | None = None,
    panel_b: AbstractSet[str] | None = None,
) -> dict:
    """The combined statistics report: distribution plus agreement."""
    report = distribution_report(docs, annotations, n_bins, ks)
    sentence_counts = {d.doc_id: d.sentence_count for d in docs}
    agreement = (
        agreement_report(annotations, sentence_counts, panel_a, panel_b)
        if annotations else AgreementReport(None, None, 0, 0)
    )
    report["alpha"] = agreement.krippendorff_alpha
    report["kappa"] = agreement.kappa
    return report


def eval_report(
    docs: Mapping[str, Document],
    annotations: Sequence[Annotation],
    systems: Mapping[str, Mapping[str, Sequence[int]]] | None = None,
    metrics: Sequence[str] = METRIC_NAMES,
) -> tuple[dict, list[dict]]:
    """Baseline table plus per-document rows.

    Always contains the lead-3 baseline (documents with any reference) and the
    jack-knifed oracle (documents with >= 2 references); caller-supplied systems
    are scored through the same multi-reference path.
    """
    by_doc = group_by_doc(annotations)
    scored_docs = {d: a for d, a in by_doc.items() if d in docs}

    table: dict[str, dict] = {}
    per_doc_rows: list[dict] = []

    lead_summaries = {doc_id: lead3(docs[doc_id]) for doc_id in scored_docs}
    result = evaluate_system(docs, scored_docs, lead_summaries, metrics)
    table["lead3"] = {m: result.scores[m].as_dict() for m in metrics}
    per_doc_rows.extend({"system": "lead3", **row} for row in result.per_doc)

    oracle_pool = {d: a for d, a in scored_docs.items() if len(a) >= 2}
    if oracle_pool:
        table["oracle"] = {
            m: oracle_jackknife(docs, oracle_pool, m).as_dict() for m in metrics}

    for name, summaries in (systems or {}).items():
        result = evaluate_system(docs, scored_docs, summaries, metrics)
        table[name] = {m: result.scores[m].as_dict() for m in metrics}
        per_doc_rows.extend({"system": name, **row} for row in result.per_doc)

    return table, per_doc_rows


# --- CSV exports -----------------------------------------------------------------

def write_judge_counts_csv(
    path: str | Path,
    docs: Mapping[str, Document],
    annotations: Sequence[Annotation],
) -> None:
    """Per-sentence judge counts at the four stages, one block per document."""
    grouped = group_by_doc(annotations)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "sentence_index", "paragraph", "section", "document", "short"])
        for doc_id in sorted(grouped):
            table = judge_count_table(grouped[doc_id], docs[doc_id].sentence_count)
            for i, row in enumerate(table):
                writer.writerow([doc_id, i, *row])


def write_partition_stats_csv(path: str | Path, report: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "mean", "ci95", "n"])
        for name, entry in report["partition_stats"].items():
            ci = "" if entry["ci95"] is None else f"{entry['ci95']:.6f}"
            writer.writerow([name, f"{entry['mean']:.6f}", ci, entry["n"]])


def write_filtration_csv(path: str | Path, report: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["from_stage", "to_stage", "ratio"])
        for key, ratio in report["filtration"].items():
            src, dst = key.split("_to_")
            writer.writerow([src, dst, "" if ratio is None else f"{ratio:.6f}"])


def write_threshold_csv(path: str | Path, report: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["min_judges", *STAGES])
        for k, row in report["threshold"].items():
            writer.writerow([k, *(f"{row[s]:.6f}" for s in STAGES)])


def write_eval_csv(path: str | Path, per_doc_rows: Sequence[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["system", "doc_id", "metric", "precision", "recall", "f1", "mean_f1"])
        for row in per_doc_rows:
            writer.writerow([
                row["system"], row["doc_id"], row["metric"],
                f"{row['precision']:.6f}", f"{row['recall']:.6f}",
                f"{row['f1']:.6f}", f"{row['mean_f1']:.6f}",
            ])


def write_stats_outputs(
    out_dir: str | Path,
    docs: Sequence[Document],
    annotations: Sequence[Annotation],
    report: dict,
) -> None:
    """Write report.json plus the four table CSVs into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from .jsonio import write_json
    write_json(out / "report.json", report)
    doc_map = {d.doc_id: d for d in docs}
    write_judge_counts_csv(out / "judge_counts.csv", doc_map, annotations)
    write_partition_stats_csv(out / "partition_stats.csv", report)
    write_filtration_csv(out / "filtration.csv", report)
    write_threshold_csv(out / "threshold.csv", report)


def partition_counts(docs: Sequence[Document]) -> dict[str, dict[str, int]]:
    """Documents and sentences per partition, always covering all four labels."""
    from .corpus import PARTITIONS
    counts = {p: {"documents": 0, "sentences": 0} for p in PARTITIONS}
    for d in docs:
        counts[d.partition]["documents"] += 1
        counts[d.partition]["sentences"] += d.sentence_count
    return counts
