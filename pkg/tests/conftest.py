import numpy as np
import pytest


def random_hurwitz(rng, n, margin=0.2):
    """Random real matrix shifted so every eigenvalue has real part <= -margin."""
    M = rng.normal(size=(n, n))
    shift = max(np.linalg.eigvals(M).real) + margin + rng.uniform(0, 0.5)
    return M - shift * np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def det_char_poly(M):
    """Monic characteristic polynomial from det(lambda I - M) sampled at n+1 points."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    lam = np.arange(n + 1, dtype=float) - n / 2.0
    vals = [np.linalg.det(l * np.eye(n) - M) for l in lam]
    return np.linalg.solve(np.vander(lam, n + 1), vals)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
