import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, title, ok, detail):
        ACCEPTANCE[number] = (title, bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} | {detail}")
