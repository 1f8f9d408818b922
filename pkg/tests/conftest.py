"""Shared fixtures for the test suite."""

from datetime import datetime, timezone

import pytest

from topicflow.corpus import DEFAULT_KEYWORDS, CleanDocument, PreprocessConfig, default_stopwords


@pytest.fixture(scope="session")
def pre_cfg() -> PreprocessConfig:
    return PreprocessConfig(stopwords=default_stopwords(), keywords=DEFAULT_KEYWORDS)


def make_doc(doc_id: str, tokens, day: int = 0, hour: int = 0, label=None) -> CleanDocument:
    """Build a CleanDocument dated `day` days after 2020-01-01 UTC."""
    from datetime import timedelta

    ts = datetime(2020, 1, 1, hour, tzinfo=timezone.utc) + timedelta(days=day)
    return CleanDocument(id=doc_id, tokens=list(tokens), timestamp=ts, label=label)
