import numpy as np
import pytest

from hypbilliard import tolerances
from hypbilliard.polytope import ideal_regular_octahedron, ideal_regular_tetrahedron


@pytest.fixture(scope="session")
def tetra():
    return ideal_regular_tetrahedron()


@pytest.fixture(scope="session")
def octa():
    return ideal_regular_octahedron()


@pytest.fixture(autouse=True)
def _fresh_tolerances():
    tolerances.reset()
    yield
    tolerances.reset()


def random_ball_point(rng, rmax=0.9):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v) * rmax * rng.uniform() ** (1 / 3)


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
