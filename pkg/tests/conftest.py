import numpy as np
import pytest
from hypothesis import settings

from spinglass.numerics import RngStream

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def stream():
    return RngStream(seed=12345)


@pytest.fixture
def gen():
    return np.random.default_rng(2024)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one verdict line per acceptance criterion; printed in the terminal summary."""

    def _record(number, passed, text):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {text}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
