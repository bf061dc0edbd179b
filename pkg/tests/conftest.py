import json
from pathlib import Path

import numpy as np
import pytest

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def frozen():
    return FROZEN


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
