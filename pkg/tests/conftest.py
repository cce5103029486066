import numpy as np
import pytest

from spherebot import model
from spherebot.scenarios import CONTROLLER_PARAMS


@pytest.fixture(scope="session")
def params():
    return model.DEFAULT_PARAMS


@pytest.fixture(scope="session")
def controller_params():
    return CONTROLLER_PARAMS


@pytest.fixture()
def rng():
    return np.random.default_rng(20260811)


def random_state(rng, scale=1.0):
    return np.ascontiguousarray(rng.uniform(-scale, scale, model.STATE_SIZE))
