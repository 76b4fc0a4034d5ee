import numpy as np
import pytest

from fejer_torus import MultiIndex, TrigPoly


def random_trigpoly(rng, p, degree, n_terms=None, real=False):
    """Random sparse polynomial in coordinates 1..p with |n_k| <= degree."""
    n_terms = int(rng.integers(1, 9)) if n_terms is None else n_terms
    coeffs = {}
    for _ in range(n_terms):
        n = MultiIndex.from_dense(rng.integers(-degree, degree + 1, size=p))
        c = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[n] = coeffs.get(n, 0) + c
        if real:
            coeffs[-n] = coeffs.get(-n, 0) + c.conjugate()
    return TrigPoly(coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
