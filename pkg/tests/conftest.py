import numpy as np
import pytest
from hypothesis import settings

from qpl import build_model

settings.register_profile("qpl", max_examples=25, deadline=None, derandomize=True)
settings.load_profile("qpl")

GROUPS = ("su2", "su3", "so3", "torus2")


@pytest.fixture(params=GROUPS)
def model(request):
    return build_model(request.param)


@pytest.fixture(params=("su2", "su3"))
def nonabelian(request):
    return build_model(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
