import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qeig import QMatrix

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Lines collected by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_quat_array(rng, shape):
    return rng.standard_normal(tuple(shape) + (4,))


def random_triangular(rng, n, spread=3.0):
    """Upper triangular quaternion matrix with a standardized complex diagonal."""
    d = rng.standard_normal((n, n, 4))
    d[np.tril(np.ones((n, n), dtype=bool), -1)] = 0.0
    lam = spread * (rng.standard_normal(n) + 1j * np.abs(rng.standard_normal(n)))
    d[np.arange(n), np.arange(n)] = 0.0
    d[np.arange(n), np.arange(n), 0] = lam.real
    d[np.arange(n), np.arange(n), 1] = lam.imag
    return QMatrix(d)


def separated_eigenvalues(rng, n, gap=0.2):
    """n standardized values whose classes are pairwise at least ``gap`` apart."""
    out = []
    while len(out) < n:
        z = complex(rng.uniform(-3, 3), rng.uniform(0, 3))
        if all(min(abs(z - w), abs(z - w.conjugate())) >= gap for w in out):
            out.append(z)
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def make_example_matrix():
    """2x2 matrix with right eigenvalues 1 and i."""
    from qeig import Quaternion as Q

    return QMatrix.from_entries([[Q(2, -1, -2, 0), Q(-1, 1, 2, 0)],
                                 [Q(2, -2, -2, 0), Q(-1, 2, 2, 0)]])


@pytest.fixture
def example_matrix():
    return make_example_matrix()
