import math

import numpy as np
import pytest

from ccurv import fixtures as fx
from ccurv import geometry as geo

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store ``(passed, detail)`` for an acceptance criterion."""
    def _record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def flat():
    return fx.plane()


@pytest.fixture(scope="session")
def sphere():
    return geo.round_sphere(1.0)


@pytest.fixture(scope="session")
def sphere_chart(sphere):
    return sphere.plane_chart()


@pytest.fixture(scope="session")
def conformal_torus():
    return geo.ConformalTorus.from_modes(np.eye(2) * 2 * math.pi,
                                         [(0.15, 1, 0, 0.3), (0.1, 0, 1, 1.1)], grid=48)


@pytest.fixture
def surface_file(tmp_path):
    """Write a surface configuration file and return its path."""
    def _write(text, name="surface.cfg"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write
