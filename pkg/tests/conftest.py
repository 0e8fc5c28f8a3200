import numpy as np
import pytest
from hypothesis import settings

from randtrig import TrigPolynomial

settings.register_profile("repo", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("repo")


def cos_poly(n, k=None):
    """cos(k t) as a degree-n polynomial in the package normalization."""
    k = n if k is None else k
    a = np.zeros(n)
    a[k - 1] = np.sqrt(n)
    return TrigPolynomial(a, np.zeros(n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record and print a criterion's pass/fail line; returns the flag for asserting."""

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        with request.config.pluginmanager.getplugin("capturemanager").global_and_fixture_disabled():
            print("\n" + line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
