import warnings

import pytest

from mzscatter.propagation import WrapAroundWarning
from mzscatter.scenario import fig1_setup
from mzscatter.interferometer import Interferometer

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def setup():
    return fig1_setup()


@pytest.fixture(scope="session")
def engine(setup):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WrapAroundWarning)
        return Interferometer(setup)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
