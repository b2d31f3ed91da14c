import sys

import numpy as np
import pytest

from gaussym.core import DiracCorrelationMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def paired_state(n, phase=1.0):
    """Pure two-mode state with occupation ``n`` on both modes and pairing ``sqrt(n(1-n))``."""
    f = phase * np.sqrt(n * (1 - n))
    G = n * np.eye(2)
    F = np.array([[0, f], [-f, 0]], dtype=complex)
    return DiracCorrelationMatrix(G, F)


def h(n):
    return -n * np.log(n) - (1 - n) * np.log(1 - n)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
