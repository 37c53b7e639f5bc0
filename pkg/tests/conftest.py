import numpy as np
import pytest

from randexp import _backend


@pytest.fixture(params=_backend.available())
def kernels(request):
    """Each available kernel backend in turn."""
    return _backend.load(request.param)


@pytest.fixture
def py_kernels():
    return _backend.load("python")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
