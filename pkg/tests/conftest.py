import pytest

from lfapprox import PrecisionContext, delta_coefficients, delta_spec
from lfapprox.approximation import ApproxConfig


@pytest.fixture(scope="session")
def ctx128():
    return PrecisionContext(bits=128)


@pytest.fixture(scope="session")
def ctx192():
    return PrecisionContext(bits=192)


@pytest.fixture(scope="session")
def ctx256():
    return PrecisionContext(bits=256)


@pytest.fixture(scope="session")
def spec():
    return delta_spec()


@pytest.fixture(scope="session")
def table100():
    return delta_coefficients(100)


@pytest.fixture(scope="session")
def table2k():
    return delta_coefficients(2000)


@pytest.fixture(scope="session")
def table10k():
    return delta_coefficients(10_000)


@pytest.fixture()
def cfg():
    def make(N=1, target="1e-20", cutoff=None):
        return ApproxConfig(N=N, target_abs_error=target, n_cutoff_override=cutoff)

    return make
