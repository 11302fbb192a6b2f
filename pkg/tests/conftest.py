import numpy as np
import pytest

from cuspsum import qseries, sums

from oracles import tau_oracle


@pytest.fixture(scope="session")
def tau_ref():
    """tau(1..10^4) from the independent eta-product oracle."""
    return tau_oracle(10_000)


@pytest.fixture(scope="session")
def delta_exact():
    return qseries.delta_qexp(10_000, exact=True)


@pytest.fixture(scope="session")
def delta_1e4():
    return qseries.delta_qexp(10_000)


@pytest.fixture(scope="session")
def delta_1e5():
    return qseries.delta_qexp(100_000)


@pytest.fixture(scope="session")
def S_delta_1e5(delta_1e5):
    return sums.partial_sums(delta_1e5)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)
