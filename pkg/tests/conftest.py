import pytest

from narxdd import ChenConfig, LagSpec, build_regressors, make_datasets


@pytest.fixture(scope="session")
def chen_pair():
    """Small noisy train/test realization shared by the cheaper tests."""
    return make_datasets(
        ChenConfig(sigma_v=0.1, omega_c=0.7, length=400, seed=101),
        ChenConfig(sigma_v=0.1, omega_c=0.7, length=100, seed=202),
    )


@pytest.fixture(scope="session")
def chen_regs(chen_pair):
    train, test = chen_pair
    lags = LagSpec()
    return build_regressors(train, lags), build_regressors(test, lags)
