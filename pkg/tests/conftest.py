import numpy as np
import pytest
from hypothesis import settings

from viscomem import kernel as K
from viscomem.field import Mesh

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@pytest.fixture
def channel():
    return Mesh("channel1d", 32)


@pytest.fixture
def periodic():
    return Mesh("periodic2d", 16, 2 * np.pi)


@pytest.fixture
def exp_kernel():
    return K.exponential()


KERNELS = {
    "exp": lambda: K.exponential(),
    "prony": lambda: K.prony([0.5, 1.0], [0.5, 3.0]),
    "poly3": lambda: K.polynomial(1.0, 3.0),
}


@pytest.fixture(params=list(KERNELS))
def kernel(request):
    return KERNELS[request.param]()
