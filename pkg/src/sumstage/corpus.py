"""Document ingestion: sentence splitting, paragraph/section segmentation, JSON I/O.

A document is an immutable hierarchy: sentences grouped into paragraphs grouped
into sections.  Paragraph ranges partition the sentence indices and section
ranges partition the paragraph indices, so every sentence belongs to exactly
one paragraph and exactly one section.

Splitting rules are deliberately rule-based and deterministic:

* sentence boundary = ``.``, ``?`` or ``!`` (plus trailing quotes/brackets)
  followed by whitespace and an uppercase letter or digit;
* a fixed abbreviation list (``e.g.``, ``i.e.``, ``etc.``, ``Dr.``, ``Mr.``,
  ``vs.``, ...) and digit.digit patterns never end a sentence;
* blank lines always end a sentence;
* a line is treated as a section header when it is markup-flagged (leading
  ``#``) or has fewer than 8 tokens, no terminal punctuation, and a blank line
  after it.  Header lines are navigational: they become ``Section.header`` and
  never appear in the sentence list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyDocument, InvariantViolation, SchemaViolation
from .jsonio import canonical_dumps, read_json

PARTITIONS = ("train", "dev", "test", "unassigned")

_ABBREVIATIONS = frozenset({
    "e.g", "i.e", "etc", "cf", "vs", "al", "ca", "approx",
    "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "no", "fig", "eq", "sec",
})

# punctuation run that may close a sentence, then the gap, then the next opener
_BOUNDARY = re.compile(r'[.?!]["\'\)\]]*\s+(?=["\'\(\[]?[A-Z0-9])')
_BLANK_SPLIT = re.compile(r"\n[ \t]*\n+")
_TERMINAL_PUNCT = ".?!:;,"


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    char_span: tuple[int, int]  # offsets into the source text


@dataclass(frozen=True)
class Paragraph:
    index: int
    sentence_range: tuple[int, int]  # half-open over sentence indices


@dataclass(frozen=True)
class Section:
    index: int
    paragraph_range: tuple[int, int]  # half-open over paragraph indices
    header: str | None = None


@dataclass(frozen=True)
class SegConfig:
    """Screen-size constraint applied when carving paragraphs."""

    max_sentences_per_screen: int = 8


@dataclass(frozen=True)
class StructureHint:
    """Layout signals for one sentence, as seen by the ingestion front-end.

    ``is_header`` means a header line immediately precedes this sentence (the
    header text itself is not part of the sentence stream); ``header_text``
    carries that line.  ``blank_line_before`` marks a blank-line boundary.
    """

    blank_line_before: bool = False
    is_header: bool = False
    header_text: str | None = None


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...]
    paragraphs: tuple[Paragraph, ...]
    sections: tuple[Section, ...]
    partition: str = "unassigned"
    source_uri: str | None = None

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    @property
    def word_count(self) -> int:
        return sum(len(s.text.split()) for s in self.sentences)

    def paragraph_sentences(self, paragraph_index: int) -> range:
        a, b = self.paragraphs[paragraph_index].sentence_range
        return range(a, b)

    def section_paragraphs(self, section_index: int) -> range:
        a, b = self.sections[section_index].paragraph_range
        return range(a, b)

    def section_sentences(self, section_index: int) -> range:
        paras = self.section_paragraphs(section_index)
        first = self.paragraphs[paras.start].sentence_range[0]
        last = self.paragraphs[paras.stop - 1].sentence_range[1]
        return range(first, last)

    def section_of_paragraph(self, paragraph_index: int) -> int:
        for sec in self.sections:
            a, b = sec.paragraph_range
            if a <= paragraph_index < b:
                return sec.index
        raise IndexError(paragraph_index)


# --- sentence splitting ------------------------------------------------------

def _protected(text: str, punct_pos: int, next_start: int) -> bool:
    """True when the boundary candidate at ``punct_pos`` must not split."""
    ch = text[punct_pos]
    if ch == ".":
        token = re.search(r"[\w.]*\w$", text[:punct_pos])
        if token and token.group().lower().lstrip(".") in _ABBREVIATIONS:
            return True
        # digit '.' digit across whitespace reads as a broken number, keep it
        if punct_pos > 0 and text[punct_pos - 1].isdigit() and text[next_start].isdigit():
            return True
    return False


def _trim_span(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def _split_block(raw: str, start: int, end: int) -> list[Sentence]:
    pieces: list[tuple[int, int]] = []
    cursor = start
    for m in _BOUNDARY.finditer(raw, start, end):
        if _protected(raw, m.start(), m.end()):
            continue
        punct_end = m.start() + len(m.group().rstrip())
        pieces.append((cursor, punct_end))
        cursor = m.end()
    pieces.append((cursor, end))

    sentences = []
    for a, b in pieces:
        a, b = _trim_span(raw, a, b)
        if a < b:
            sentences.append(Sentence(index=0, text=raw[a:b], char_span=(a, b)))
    return sentences


def split_sentences(raw: str) -> list[Sentence]:
    """Split raw text into sentences with spans into ``raw``.

    Blank lines are hard boundaries; single newlines are soft wraps.  Raises
    EmptyDocument when nothing survives trimming.
    """
    sentences: list[Sentence] = []
    cursor = 0
    for m in list(_BLANK_SPLIT.finditer(raw)) + [None]:
        block_end = m.start() if m else len(raw)
        sentences.extend(_split_block(raw, cursor, block_end))
        cursor = m.end() if m else len(raw)
    if not sentences:
        raise EmptyDocument("no sentence survives trimming")
    return [replace(s, index=i) for i, s in enumerate(sentences)]


# --- layout analysis ---------------------------------------------------------

def _is_header_line(stripped: str, next_is_blank: bool, forced: bool) -> bool:
    if not stripped:
        return False
    if forced or stripped.startswith("#"):
        return True
    return (
        len(stripped.split()) < 8
        and stripped[-1] not in _TERMINAL_PUNCT
        and next_is_blank
    )


def parse_text(
    raw: str,
    forced_header_lines: Iterable[int] = (),
) -> tuple[list[Sentence], list[StructureHint]]:
    """Split raw text into sentences plus per-sentence layout hints.

    Header lines are removed from the sentence stream; the first sentence after
    a header carries ``is_header=True`` and the header's text.
    ``forced_header_lines`` are 0-based indices into the raw line list, used by
    sidecar files to override the heuristic.
    """
    forced = set(forced_header_lines)
    lines = raw.split("\n")
    offsets = []
    pos = 0
    for line in lines:
        offsets.append(pos)
        pos += len(line) + 1

    sentences: list[Sentence] = []
    hints: list[StructureHint] = []
    pending_header: str | None = None
    pending_blank = False
    block: list[tuple[int, int]] = []  # (start, end) of contiguous content lines

    def flush_block() -> None:
        nonlocal pending_header, pending_blank, block
        if not block:
            return
        start = block[0][0]
        end = block[-1][1]
        block_sents = _split_block(raw, start, end)
        for j, s in enumerate(block_sents):
            first = j == 0
            hints.append(StructureHint(
                blank_line_before=first and pending_blank,
                is_header=first and pending_header is not None,
                header_text=pending_header if first else None,
            ))
            sentences.append(s)
        if block_sents:
            pending_header = None
            pending_blank = False
        block = []

    for i, line in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            if block:
                flush_block()
            pending_blank = True
            continue
        next_is_blank = i + 1 >= len(lines) or not lines[i + 1].strip()
        if _is_header_line(stripped, next_is_blank, i in forced):
            if block:
                flush_block()
            pending_header = stripped.lstrip("#").strip() or stripped
            continue
        block.append((offsets[i], offsets[i] + len(line)))
    flush_block()

    if not sentences:
        raise EmptyDocument("no sentence survives trimming")
    sentences = [replace(s, index=i) for i, s in enumerate(sentences)]
    return sentences, hints


# --- segmentation ------------------------------------------------------------

def segment(
    sentences: Sequence[Sentence],
    hints: Sequence[StructureHint],
    config: SegConfig = SegConfig(),
) -> tuple[list[Paragraph], list[Section]]:
    """Carve sentences into paragraphs and paragraphs into sections.

    Header hints start sections, blank-line hints start paragraphs, and any
    paragraph longer than the screen limit is chunked greedily left to right.
    A document without header hints yields exactly one section.
    """
    if len(hints) != len(sentences):
        raise ValueError("hints must align 1:1 with sentences")
    if config.max_sentences_per_screen < 1:
        raise ValueError("max_sentences_per_screen must be >= 1")
    n = len(sentences)
    if n == 0:
        return [], []

    section_starts = {0} | {i for i, h in enumerate(hints) if h.is_header}
    para_starts = section_starts | {i for i, h in enumerate(hints) if h.blank_line_before}

    bounds = sorted(para_starts) + [n]
    para_ranges: list[tuple[int, int]] = []
    for a, b in zip(bounds, bounds[1:]):
        while b - a > config.max_sentences_per_screen:
            para_ranges.append((a, a + config.max_sentences_per_screen))
            a += config.max_sentences_per_screen
        para_ranges.append((a, b))

    paragraphs = [Paragraph(index=i, sentence_range=r) for i, r in enumerate(para_ranges)]

    sec_first_paras = [i for i, p in enumerate(paragraphs) if p.sentence_range[0] in section_starts]
    sec_bounds = sec_first_paras + [len(paragraphs)]
    sections = []
    for i, (a, b) in enumerate(zip(sec_bounds, sec_bounds[1:])):
        first_sentence = paragraphs[a].sentence_range[0]
        hint = hints[first_sentence]
        sections.append(Section(
            index=i,
            paragraph_range=(a, b),
            header=hint.header_text if hint.is_header else None,
        ))
    return paragraphs, sections


def build_document(
    doc_id: str,
    raw: str,
    config: SegConfig = SegConfig(),
    partition: str = "unassigned",
    source_uri: str | None = None,
    forced_header_lines: Iterable[int] = (),
) -> Document:
    """Full ingestion path: raw text to a validated Document."""
    sentences, hints = parse_text(raw, forced_header_lines)
    paragraphs, sections = segment(sentences, hints, config)
    doc = Document(
        doc_id=doc_id,
        sentences=tuple(sentences),
        paragraphs=tuple(paragraphs),
        sections=tuple(sections),
        partition=partition,
        source_uri=source_uri,
    )
    validate_document(doc, max_sentences_per_screen=config.max_sentences_per_screen)
    return doc


# --- validation --------------------------------------------------------------

def validate_document(doc: Document, max_sentences_per_screen: int | None = None) -> None:
    """Check every structural invariant; raise InvariantViolation on the first break."""
    if not doc.doc_id:
        raise InvariantViolation("doc_id", "doc_id must be non-empty")
    if doc.partition not in PARTITIONS:
        raise InvariantViolation("partition", f"unknown partition {doc.partition!r}")

    prev_end = -1
    for i, s in enumerate(doc.sentences):
        if s.index != i:
            raise InvariantViolation("sentence indices", f"sentence {i} has index {s.index}")
        if not s.text.strip():
            raise InvariantViolation("sentence text", f"sentence {i} is blank")
        a, b = s.char_span
        if not (0 <= a < b):
            raise InvariantViolation("sentence spans", f"sentence {i} span {s.char_span} is empty")
        if a < prev_end:
            raise InvariantViolation("sentence spans", f"sentence {i} span overlaps its predecessor")
        prev_end = b

    _check_partition_ranges(
        [p.sentence_range for p in doc.paragraphs], len(doc.sentences), "paragraph")
    for i, p in enumerate(doc.paragraphs):
        if p.index != i:
            raise InvariantViolation("paragraph indices", f"paragraph {i} has index {p.index}")
        length = p.sentence_range[1] - p.sentence_range[0]
        if max_sentences_per_screen is not None and length > max_sentences_per_screen:
            raise InvariantViolation(
                "paragraph length",
                f"paragraph {i} has {length} sentences (limit {max_sentences_per_screen})")

    _check_partition_ranges(
        [s.paragraph_range for s in doc.sections], len(doc.paragraphs), "section")
    for i, s in enumerate(doc.sections):
        if s.index != i:
            raise InvariantViolation("section indices", f"section {i} has index {s.index}")


def _check_partition_ranges(ranges: list[tuple[int, int]], total: int, kind: str) -> None:
    if total == 0:
        if ranges:
            raise InvariantViolation(f"{kind} ranges", f"{kind}s over an empty parent")
        return
    if not ranges:
        raise InvariantViolation(f"{kind} ranges", f"no {kind}s cover indices 0..{total - 1}")
    cursor = 0
    for a, b in ranges:
        if a != cursor:
            raise InvariantViolation(
                f"{kind} ranges", f"{kind} range [{a},{b}) leaves a gap or overlap at {cursor}")
        if b <= a:
            raise InvariantViolation(f"{kind} ranges", f"{kind} range [{a},{b}) is empty")
        cursor = b
    if cursor != total:
        raise InvariantViolation(f"{kind} ranges", f"{kind} ranges stop at {cursor}, expected {total}")


# --- JSON schema --------------------------------------------------------------

def document_to_json(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "source_uri": doc.source_uri,
        "partition": doc.partition,
        "sentences": [
            {"index": s.index, "text": s.text, "span": [s.char_span[0], s.char_span[1]]}
            for s in doc.sentences
        ],
        "paragraphs": [
            {"index": p.index, "sentences": [p.sentence_range[0], p.sentence_range[1]]}
            for p in doc.paragraphs
        ],
        "sections": [
            {"index": s.index, "paragraphs": [s.paragraph_range[0], s.paragraph_range[1]],
             "header": s.header}
            for s in doc.sections
        ],
    }


def _expect(data: dict, field: str, types, path: str, nullable: bool = False):
    if field not in data:
        raise SchemaViolation(path, f"missing field {path!r}")
    value = data[field]
    if value is None:
        if nullable:
            return None
        raise SchemaViolation(path, f"{path!r} must not be null")
    if not isinstance(value, types) or isinstance(value, bool):
        raise SchemaViolation(path, f"{path!r} has wrong type {type(value).__name__}")
    return value


def _expect_pair(data: dict, field: str, path: str) -> tuple[int, int]:
    value = _expect(data, field, list, path)
    if len(value) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SchemaViolation(path, f"{path!r} must be a pair of integers")
    return value[0], value[1]


def document_from_json(data: object) -> Document:
    """Parse and validate the document JSON schema.

    Raises SchemaViolation (with a field path) on malformed payloads and
    InvariantViolation when the hierarchy is structurally broken.
    """
    if not isinstance(data, dict):
        raise SchemaViolation("", "document payload must be an object")
    doc_id = _expect(data, "doc_id", str, "doc_id")
    source_uri = _expect(data, "source_uri", str, "source_uri", nullable=True)
    partition = _expect(data, "partition", str, "partition")
    if partition not in PARTITIONS:
        raise SchemaViolation("partition", f"partition must be one of {PARTITIONS}")

    sentences = []
    for i, item in enumerate(_expect(data, "sentences", list, "sentences")):
        path = f"sentences[{i}]"
        if not isinstance(item, dict):
            raise SchemaViolation(path, f"{path} must be an object")
        sentences.append(Sentence(
            index=_expect(item, "index", int, f"{path}.index"),
            text=_expect(item, "text", str, f"{path}.text"),
            char_span=_expect_pair(item, "span", f"{path}.span"),
        ))

    paragraphs = []
    for i, item in enumerate(_expect(data, "paragraphs", list, "paragraphs")):
        path = f"paragraphs[{i}]"
        if not isinstance(item, dict):
            raise SchemaViolation(path, f"{path} must be an object")
        paragraphs.append(Paragraph(
            index=_expect(item, "index", int, f"{path}.index"),
            sentence_range=_expect_pair(item, "sentences", f"{path}.sentences"),
        ))

    sections = []
    for i, item in enumerate(_expect(data, "sections", list, "sections")):
        path = f"sections[{i}]"
        if not isinstance(item, dict):
            raise SchemaViolation(path, f"{path} must be an object")
        sections.append(Section(
            index=_expect(item, "index", int, f"{path}.index"),
            paragraph_range=_expect_pair(item, "paragraphs", f"{path}.paragraphs"),
            header=_expect(item, "header", str, f"{path}.header", nullable=True),
        ))

    doc = Document(
        doc_id=doc_id,
        sentences=tuple(sentences),
        paragraphs=tuple(paragraphs),
        sections=tuple(sections),
        partition=partition,
        source_uri=source_uri,
    )
    validate_document(doc)
    return doc


def store_document(doc: Document, path: str | Path) -> None:
    validate_document(doc)
    Path(path).write_text(canonical_dumps(document_to_json(doc)), encoding="utf-8")


def load_document(path: str | Path) -> Document:
    return document_from_json(read_json(path))


def load_corpus_dir(corpus_dir: str | Path) -> dict[str, Document]:
    """Load every ``*.json`` document in a directory, keyed by doc_id."""
    docs: dict[str, Document] = {}
    for path in sorted(Path(corpus_dir).glob("*.json")):
        doc = load_document(path)
        docs[doc.doc_id] = doc
    return docs
