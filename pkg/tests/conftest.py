import sys
from pathlib import Path

import numpy as np
import pytest

from rankdyn.sample import FunctionalSample
from rankdyn.simulation import SimModel, generate_sample

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def model():
    return SimModel()


@pytest.fixture(scope="session")
def sim50(model):
    """Verification-model sample with n=50 on the m=31 grid."""
    return generate_sample(model, 50, seed=424242)


@pytest.fixture(scope="session")
def sim200(model):
    return generate_sample(model, 200, seed=77)


@pytest.fixture(scope="session")
def tiny_sample():
    """n=3, m=5 shared-grid toy used by the brute-force oracle checks."""
    grid = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    vals = np.array(
        [
            [0.2, 0.5, 0.9, 1.4, 2.0],
            [1.1, 1.0, 0.8, 0.7, 0.9],
            [-0.3, 0.1, 0.4, 0.2, 0.0],
        ]
    )
    return FunctionalSample.from_matrix(grid, vals, ids=["a", "b", "c"])


def constant_sample(levels, grid_size=33):
    grid = np.linspace(0.0, 1.0, grid_size)
    vals = np.vstack([np.full(grid_size, c) for c in levels])
    return FunctionalSample.from_matrix(grid, vals)
