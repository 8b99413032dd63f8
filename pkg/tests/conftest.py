from __future__ import annotations

import pytest

from sumstage.corpus import SegConfig, build_document

from helpers import WALKTHROUGH_RAW, judge_pool_annotations, judge_pool_document


@pytest.fixture
def walkthrough_doc():
    return build_document("walkthrough", WALKTHROUGH_RAW, SegConfig(max_sentences_per_screen=8))


@pytest.fixture
def pool_doc():
    return judge_pool_document()


@pytest.fixture
def pool_anns():
    return judge_pool_annotations()
