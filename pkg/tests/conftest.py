import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from conevol import build_from_halfspaces, build_from_vertices, generate  # noqa: E402

settings.register_profile(
    "default", max_examples=25, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SQRT3 = math.sqrt(3.0)
TRIANGLE = [[1.0, 0.0], [-0.5, SQRT3 / 2], [-0.5, -SQRT3 / 2]]

ACCEPTANCE_LINES = []


@pytest.fixture
def square():
    return build_from_vertices([[1, 1], [1, -1], [-1, 1], [-1, -1]])


@pytest.fixture
def cube():
    return build_from_halfspaces(np.vstack([np.eye(3), -np.eye(3)]), np.ones(6))


@pytest.fixture
def triangle():
    return build_from_vertices(TRIANGLE)


@pytest.fixture
def prism():
    return generate("named:triangle*named:segment")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
