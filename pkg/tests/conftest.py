import math

import pytest

from hetcache import NetworkConfig


def make_config(**overrides) -> NetworkConfig:
    """Config with pi*gamma^2*lambda_s = 1 and pi*R^2 = 100*pi by default."""
    params = dict(
        lambda_u=0.1,
        lambda_s=1.0 / math.pi,
        lambda_r=1.0,
        R=10.0,
        gamma=1.0,
        B=1.0,
        R0=1.0,
        N=2,
        M=1,
    )
    params.update(overrides)
    return NetworkConfig(**params)


def sbs_density(c: float, gamma: float = 1.0) -> float:
    """SBS density giving lambda_s * pi * gamma^2 = c."""
    return c / (math.pi * gamma**2)


@pytest.fixture
def config():
    return make_config()
