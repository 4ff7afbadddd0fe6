import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from symstat.core import corpus  # noqa: E402

_CRITERIA: dict[int, str] = {}


@pytest.fixture(scope="session")
def kernels():
    return {e.name: e for e in corpus()}


@pytest.fixture
def criterion():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
