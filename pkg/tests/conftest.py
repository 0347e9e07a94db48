import numpy as np
import pytest

from tetrademag.geometry import Tetrahedron

REFERENCE_VERTICES = np.array([(2.5, 3.0, 1.0), (2.0, 1.0, 4.0), (1.5, 4.0, 3.0), (4.5, 5.0, 2.0)]) * 1e-3
REFERENCE_M = np.array([0.32, 0.74, 0.89])
REFERENCE_THROUGH = np.array([3.0, 3.0, 2.5]) * 1e-3

_acceptance_lines = []


@pytest.fixture
def reference_tet():
    return Tetrahedron.from_array(REFERENCE_VERTICES)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one summary line per acceptance criterion."""
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
