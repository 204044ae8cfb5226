import sys

import numpy as np
import pytest

from isoqsim.channels import BathParams


@pytest.fixture
def rng():
    return np.random.default_rng(20200401)


@pytest.fixture
def unit_bath():
    return BathParams(beta=1.0, gamma0=1.0)


def max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
