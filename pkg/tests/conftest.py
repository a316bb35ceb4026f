import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_density(M, rng, rank=None):
    rank = rank or M
    X = rng.normal(size=(M, rank)) + 1j * rng.normal(size=(M, rank))
    rho = X @ X.conj().T
    return rho / np.trace(rho).real


def random_hermitian(M, rng):
    X = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    return (X + X.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
