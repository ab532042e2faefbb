import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hybridlink import data  # noqa: E402
from hybridlink.bridge import LinkConfig, matlabinit  # noqa: E402
from hybridlink.workbook import load_csv  # noqa: E402

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def fig6_workbook():
    return load_csv(data.figure6_workbook())


@pytest.fixture
def fixed_clock():
    ticks = iter(range(1_000_000_000, 2_000_000_000, 1000))
    return lambda: next(ticks)


@pytest.fixture
def session(fig6_workbook, fixed_clock):
    return matlabinit(LinkConfig(session_id="test", clock=fixed_clock), fig6_workbook)
