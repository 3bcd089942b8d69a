import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rankselect.data_io import SyntheticSpec, generate_synthetic  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def planted():
    """225 x 36 planted-signal table with five informative features."""
    return generate_synthetic(SyntheticSpec(n_rows=225, n_features=36, n_informative=5,
                                            noise_sd=1.0, seed=7))
