import math

import numpy as np
import pytest

from projreg import ForceModel, ManevParams, lift_initial_conditions


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def kepler_params():
    return ManevParams(m=1.0, k1=1.0)


@pytest.fixture
def kepler_model():
    return ForceModel(v0="kepler")


def perihelion_ic(e: float, params: ManevParams, a: float = 1.0):
    """Perihelion position/velocity of a bound inverse-square orbit."""
    k_bar = params.k1_bar
    r0 = a * (1.0 - e)
    v0 = math.sqrt(k_bar * (1.0 + e) / (a * (1.0 - e)))
    return np.array([r0, 0.0, 0.0]), np.array([0.0, v0, 0.0])


def random_phase_point(rng, nsp=3):
    """Point with spatial norm and normal coordinate away from the domain boundary."""
    from projreg import ConfigPoint, PhasePoint

    direction = rng.normal(size=nsp)
    direction /= np.linalg.norm(direction)
    base = ConfigPoint(direction * rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))
    return PhasePoint(base, rng.uniform(-2, 2, size=nsp), rng.uniform(-2, 2))


@pytest.fixture
def circular_mu(kepler_params):
    return lift_initial_conditions([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], kepler_params)
