import numpy as np
import pytest

from nlsdtn import asymptotics


@pytest.fixture(scope="session")
def constants():
    return asymptotics.extract_constants(800.0, 200.0)


def decay_exponent(t, err):
    """Slope of ``-log err`` against ``log t`` (least squares)."""
    return -np.polyfit(np.log(t), np.log(err), 1)[0]


def window_max(f, centers, width=2 * np.pi, n=64):
    """Max of ``|f|`` over ``[c, c + width]`` for every center ``c``."""
    return np.array([np.max(np.abs(f(np.linspace(c, c + width, n)))) for c in centers])


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
