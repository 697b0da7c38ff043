import numpy as np
import pytest

from spectral_boltzmann.ckernel import CollisionParams
from spectral_boltzmann.vgrid import VelocityGrid


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests on full-size grids")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def small_grid():
    return VelocityGrid(L=8.0, N=16)


@pytest.fixture
def fine_grid():
    return VelocityGrid(L=8.0, N=32)


@pytest.fixture
def maxwell():
    return CollisionParams(g_tr=8.0)


@pytest.fixture
def rotations():
    """Five random proper rotations, from QR factors of Gaussian matrices."""
    rng = np.random.default_rng(17)
    out = []
    for _ in range(5):
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        out.append(q)
    return out
