import numpy as np
import pytest
from hypothesis import settings

from ellrs.lax import ModelParams

settings.register_profile("ellrs", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("ellrs")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[2, 3, 4])
def params(request):
    return ModelParams(n=request.param)
