"""Canonical JSON serialization helpers.

Every file this package writes goes through these functions so that
re-running a command on identical input produces byte-identical output.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator


def canonical_dumps(obj: Any) -> str:
    """Pretty, deterministic rendering used for single-object files."""
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def line_dumps(obj: Any) -> str:
    """Compact single-line rendering used for JSONL records."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(canonical_dumps(obj), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_jsonl(path: str | Path, objs: Iterable[Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(line_dumps(obj) + "\n")


def read_jsonl(path: str | Path) -> Iterator[Any]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
