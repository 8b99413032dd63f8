"""Batch entry points: ingest, serve, stats, eval, export, simulate.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import PARTITIONS, SegConfig, build_document, load_corpus_dir, store_document
from .errors import SumstageError
from .jsonio import read_json, write_json
from .session import SessionConfig, annotation_from_json, annotation_to_json
from .reports import (
    eval_report,
    full_report,
    group_by_doc,
    partition_counts,
    write_eval_csv,
    write_stats_outputs,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _session_config(args) -> SessionConfig:
    return SessionConfig(
        min_paragraph_selections=args.min_para,
        min_section_selections=args.min_sec,
        short_summary_size=args.short_size,
    )


def _positive(args, *names) -> None:
    for name in names:
        if getattr(args, name) < 1:
            raise ValueError(f"--{name.replace('_', '-')} must be >= 1")


def _add_session_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-para", type=int, default=1,
                        help="minimum selections per paragraph stage")
    parser.add_argument("--min-sec", type=int, default=1,
                        help="minimum selections per section stage")
    parser.add_argument("--short-size", type=int, default=3,
                        help="short summary size (exact, clamped by the document summary)")


def _print_partition_table(counts: dict) -> None:
    print(f"{'partition':<12}{'documents':>10}{'sentences':>11}")
    for partition in PARTITIONS:
        entry = counts.get(partition, {"documents": 0, "sentences": 0})
        print(f"{partition:<12}{entry['documents']:>10}{entry['sentences']:>11}")


# --- subcommands -----------------------------------------------------------------

def cmd_ingest(args) -> int:
    in_dir = Path(args.input)
    out_dir = Path(args.out)
    if not in_dir.is_dir():
        print(f"input directory not found: {in_dir}", file=sys.stderr)
        return EXIT_IO
    out_dir.mkdir(parents=True, exist_ok=True)
    config = SegConfig(max_sentences_per_screen=args.max_screen)

    failures = 0
    docs = []
    for path in sorted(in_dir.glob("*.txt")):
        meta_path = path.with_suffix(".meta.json")
        meta = read_json(meta_path) if meta_path.exists() else {}
        try:
            doc = build_document(
                doc_id=str(meta.get("doc_id", path.stem)),
                raw=path.read_text(encoding="utf-8"),
                config=config,
                partition=str(meta.get("partition", args.partition or "unassigned")),
                source_uri=meta.get("source_uri"),
                forced_header_lines=meta.get("header_lines", ()),
            )
            store_document(doc, out_dir / f"{doc.doc_id}.json")
            docs.append(doc)
        except (SumstageError, ValueError) as exc:
            failures += 1
            print(f"{path.name}: {exc}", file=sys.stderr)

    _print_partition_table(partition_counts(docs))
    print(f"ingested {len(docs)} documents" + (f", {failures} failed" if failures else ""))
    return EXIT_VALIDATION if failures else EXIT_OK


def cmd_simulate(args) -> int:
    from .simulate import JudgeBehavior, simulate_judges
    _positive(args, "judges")
    docs = list(load_corpus_dir(args.corpus).values())
    if not docs:
        print("corpus is empty", file=sys.stderr)
        return EXIT_VALIDATION
    behavior = JudgeBehavior(
        paragraph_keep=args.para_keep,
        section_keep=args.sec_keep,
        document_keep=args.doc_keep,
        positional_bias=args.bias,
    )
    annotations = simulate_judges(docs, args.judges, behavior, args.seed, _session_config(args))
    with open(args.out, "w", encoding="utf-8") as fh:
        for a in annotations:
            fh.write(json.dumps(annotation_to_json(a), ensure_ascii=False,
                                separators=(",", ":")) + "\n")
    print(f"wrote {len(annotations)} annotations to {args.out}")
    return EXIT_OK


def _load_annotations(path: str) -> list:
    annotations = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                annotations.append(annotation_from_json(json.loads(line)))
    return annotations


def cmd_stats(args) -> int:
    _positive(args, "bins")
    docs = list(load_corpus_dir(args.corpus).values())
    if args.partition:
        docs = [d for d in docs if d.partition == args.partition]
    doc_ids = {d.doc_id for d in docs}
    annotations = [a for a in _load_annotations(args.annotations) if a.doc_id in doc_ids]
    panel_a = set(args.panel_a.split(",")) if args.panel_a else None
    panel_b = set(args.panel_b.split(",")) if args.panel_b else None
    report = full_report(docs, annotations, n_bins=args.bins,
                         panel_a=panel_a, panel_b=panel_b)
    write_stats_outputs(args.out, docs, annotations, report)
    print(f"report written to {Path(args.out) / 'report.json'}")
    return EXIT_OK


def cmd_eval(args) -> int:
    from .evaluation import load_system_summaries
    docs = load_corpus_dir(args.corpus)
    if args.partition:
        docs = {k: d for k, d in docs.items() if d.partition == args.partition}
    annotations = [a for a in _load_annotations(args.annotations) if a.doc_id in docs]
    systems = {}
    for entry in args.system or ():
        if "=" not in entry:
            print(f"--system expects NAME=PATH, got {entry!r}", file=sys.stderr)
            return EXIT_VALIDATION
        name, path = entry.split("=", 1)
        systems[name] = load_system_summaries(path)
    table, per_doc = eval_report(docs, annotations, systems)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / "eval.json", table)
    write_eval_csv(out_dir / "eval_per_doc.csv", per_doc)
    print(f"evaluation written to {out_dir / 'eval.json'}")
    return EXIT_OK


def cmd_export(args) -> int:
    from .service import AnnotationService, ServiceConfig
    service = AnnotationService(
        corpus_dir=args.corpus,
        log_path=args.log,
        config=ServiceConfig(required_judges=args.judges, session=_session_config(args)),
    )
    try:
        bundle = service.export_dataset(args.partition, include_incomplete=args.include_incomplete)
    finally:
        service.close()
    write_json(args.out, bundle)
    _print_partition_table(bundle["counts"])
    print(f"bundle written to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn
    _positive(args, "judges", "port")
    from .api import create_app
    from .service import AnnotationService, ServiceConfig
    service = AnnotationService(
        corpus_dir=args.corpus,
        log_path=args.log,
        config=ServiceConfig(required_judges=args.judges, session=_session_config(args)),
    )
    uvicorn.run(create_app(service), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumstage",
        description="Staged sentence-selection annotation: ingest, serve, stats, eval, export, simulate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw text files into document JSON")
    p.add_argument("--input", required=True, help="directory of .txt files (+ optional .meta.json)")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.add_argument("--partition", choices=PARTITIONS, default=None,
                   help="partition label for files without a sidecar")
    p.add_argument("--max-screen", type=int, default=8,
                   help="maximum sentences per paragraph screen")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("simulate", help="generate synthetic judge annotations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output annotations JSONL")
    p.add_argument("--judges", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--para-keep", type=float, default=0.5)
    p.add_argument("--sec-keep", type=float, default=0.5)
    p.add_argument("--doc-keep", type=float, default=0.5)
    p.add_argument("--bias", type=float, default=1.0,
                   help="geometric positional damping per decile (1.0 = none)")
    _add_session_flags(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("stats", help="distribution + agreement report and CSV tables")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations", required=True, help="annotations JSONL")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--partition", choices=PARTITIONS, default=None)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--panel-a", default=None, help="comma-separated judge ids")
    p.add_argument("--panel-b", default=None, help="comma-separated judge ids")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("eval", help="multi-reference ROUGE of baselines and systems")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations", required=True, help="annotations JSONL (references)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--partition", choices=PARTITIONS, default=None)
    p.add_argument("--system", action="append",
                   help="NAME=PATH of a system-summary JSONL; repeatable")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("export", help="dataset bundle from a service state")
    p.add_argument("--corpus", required=True)
    p.add_argument("--log", required=True, help="event log path")
    p.add_argument("--out", required=True, help="output bundle JSON")
    p.add_argument("--partition", choices=PARTITIONS, default=None)
    p.add_argument("--include-incomplete", action="store_true")
    p.add_argument("--judges", type=int, default=5, help="judges required per task")
    _add_session_flags(p)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("serve", help="run the annotation API")
    p.add_argument("--corpus", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--judges", type=int, default=5, help="judges required per task")
    _add_session_flags(p)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SumstageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
