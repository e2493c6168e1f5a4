from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lectern.data import lecture  # noqa: E402
from lectern.embed import EmbedderConfig  # noqa: E402
from lectern.summarize import SummaryParams  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
SRT_GOOD = sorted((FIXTURES / "srt" / "good").glob("*.srt"))
SRT_BAD = sorted((FIXTURES / "srt" / "bad").glob("*.srt"))

HASHED = EmbedderConfig(backend="hashed")


def hashed_params(**kwargs) -> SummaryParams:
    kwargs.setdefault("embedder", HASHED)
    return SummaryParams(**kwargs)


@pytest.fixture
def ihie_text() -> str:
    return lecture("ihie")


@pytest.fixture
def td0_text() -> str:
    return lecture("td0")


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
