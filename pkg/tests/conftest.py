import numpy as np
import pytest

from aliaskit import backend

ACCEPTANCE_LINES = []


@pytest.fixture(params=["numba", "numpy"])
def any_backend(request):
    """Run the test once per backend, restoring the previous one after."""
    if request.param == "numba" and not backend.HAVE_NUMBA:
        pytest.skip("numba not importable")
    prev = backend.active_backend()
    backend.set_backend(request.param)
    yield request.param
    backend.set_backend(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(0xA11A5)


@pytest.fixture
def acceptance():
    """Record a one-line verdict shown in the terminal summary."""

    def record(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
