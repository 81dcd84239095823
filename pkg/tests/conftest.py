import numpy as np
import pytest

from hmimo import EmConstants

#: lines registered by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line("=== acceptance criteria ===")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def k30():
    """Constants at the 30 GHz study carrier."""
    return EmConstants.from_frequency(30e9)


@pytest.fixture()
def rng():
    return np.random.default_rng(2026)
