import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spanmeta.fixtures import quick_fox, quick_fox_overlapping  # noqa: E402


@pytest.fixture
def fox():
    return quick_fox()


@pytest.fixture
def overlapping():
    return quick_fox_overlapping()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
