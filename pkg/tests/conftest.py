import numpy as np
import pytest

from pkm import Variant, default_params, home_height
from pkm.parasitic import solve_loop_closure

SEED = 20260819


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def z3_params():
    return default_params(Variant.Z3_PRS)


@pytest.fixture
def a3_params():
    return default_params(Variant.A3_RPS)


@pytest.fixture(params=[Variant.Z3_PRS, Variant.A3_RPS], ids=["z3", "a3"])
def params(request):
    return default_params(request.param)


def random_compatible_pose(params, rng, max_tilt_deg=40.0, dz_range=(-100.0, 50.0)):
    """A random pose on the constraint manifold: tilts plus solved parasitics."""
    psi, theta = np.radians(rng.uniform(-max_tilt_deg, max_tilt_deg, size=2))
    z = home_height(params) + rng.uniform(*dz_range)
    return solve_loop_closure(params, psi, theta, z)
