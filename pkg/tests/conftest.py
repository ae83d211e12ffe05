import pytest
from hypothesis import HealthCheck, settings

from eitmag import DopplerConfig, ModelParams, PhysicalConstants

settings.register_profile(
    "ci",
    max_examples=150,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def base():
    """Strong-coupling working point (g2n=100, omega=1, kappa=2, gp=1e-3, delta=1e-2)."""
    return ModelParams(g2n=100.0, omega=1.0, kappa=2.0, gamma_prime=1e-3, delta=1e-2)


@pytest.fixture
def improved():
    """Narrow-window working point (g2n=200, omega=0.5, gp=5e-4, delta=1e-3)."""
    return ModelParams(g2n=200.0, omega=0.5, kappa=2.0, gamma_prime=5e-4, delta=1e-3)


@pytest.fixture
def doppler_1mk():
    return DopplerConfig()


@pytest.fixture
def constants():
    return PhysicalConstants()
