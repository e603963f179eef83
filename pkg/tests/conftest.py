import sys
from pathlib import Path

import numpy as np
import pytest

from umgf import _kernels
from umgf.bench import available_backends, backend

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=available_backends())
def each_backend(request):
    with backend(request.param):
        yield request.param


@pytest.fixture(autouse=True)
def _restore_backend():
    before = _kernels.get_backend()
    yield
    _kernels.set_backend(before)


DATA = Path(__file__).parent / "data"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
