#!/usr/bin/env python3
"""Drive one judge through a full staged annotation against a live service.

Builds the two-section demo document, walks paragraph -> section -> document ->
short summaries through the AnnotationService, and prints the candidate sets
seen at every screen plus the final nested annotation.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import (  # noqa: E402
    WALKTHROUGH_RAW,
    WALKTHROUGH_DOCUMENT,
    WALKTHROUGH_PARAGRAPHS,
    WALKTHROUGH_SECTIONS,
    WALKTHROUGH_SHORT,
)

from sumstage.corpus import build_document  # noqa: E402
from sumstage.service import AnnotationService, ServiceConfig  # noqa: E402


def main() -> int:
    plan = [
        WALKTHROUGH_PARAGRAPHS[0], WALKTHROUGH_PARAGRAPHS[1], WALKTHROUGH_SECTIONS[0],
        WALKTHROUGH_PARAGRAPHS[2], WALKTHROUGH_PARAGRAPHS[3], WALKTHROUGH_SECTIONS[1],
        WALKTHROUGH_DOCUMENT, WALKTHROUGH_SHORT,
    ]
    with tempfile.TemporaryDirectory() as tmp:
        service = AnnotationService(
            corpus_dir=Path(tmp) / "corpus",
            log_path=Path(tmp) / "events.jsonl",
            config=ServiceConfig(required_judges=1),
        )
        service.add_document(build_document("demo", WALKTHROUGH_RAW))
        service.register_judge("demo-judge")
        _, session = service.next_task("demo-judge")

        view = service.session_view(session.session_id)
        for selected in plan:
            stage = view["stage"]
            cands = [c["index"] for c in view["candidates"]]
            print(f"stage {stage['number']}/{stage['total']} "
                  f"{stage['kind']:<9} candidates={cands} -> select {sorted(selected)}")
            response = service.submit(session.session_id, "demo-judge", sorted(selected))
            view = response["session"]

        annotation = view["annotation"]
        print("\ncompleted; nested selections:")
        print(f"  paragraph: {sorted(set().union(*map(set, annotation['paragraph'].values())))}")
        print(f"  section:   {sorted(set().union(*map(set, annotation['section'].values())))}")
        print(f"  document:  {annotation['document']}")
        print(f"  short:     {annotation['short']}")
        service.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
