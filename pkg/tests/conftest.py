import numpy as np
import pytest


def random_simplex(rng, n):
    return rng.dirichlet(np.ones(n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def simplex_corpus():
    """1000 Dirichlet(1) points with N drawn from 2..10."""
    r = np.random.default_rng(7)
    return [random_simplex(r, int(r.integers(2, 11))) for _ in range(1000)]


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion's outcome, then assert it."""

    def record(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
