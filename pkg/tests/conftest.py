import numpy as np
import pytest


def random_hurwitz(rng, d):
    """Random stable matrix: shifted Gaussian with all eigenvalues left of -0.1."""
    M = rng.normal(size=(d, d))
    shift = np.max(np.linalg.eigvals(M).real) + rng.uniform(0.1, 2.0)
    return M - shift * np.eye(d)


def random_spd(rng, d, floor=0.1):
    G = rng.normal(size=(d, d))
    return G @ G.T + floor * np.eye(d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
