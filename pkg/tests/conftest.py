import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tlbt.systems import StateSpaceSystem

settings.register_profile(
    "ci",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def rand_stable(n, m, p, rng, margin=0.3):
    """Random stable system; spectral abscissa at most -margin."""
    g = rng.standard_normal((n, n))
    shift = max(np.linalg.eigvals(g).real.max(), 0.0) + margin + rng.uniform(0.2, 1.0)
    a = g - shift * np.eye(n)
    b = rng.standard_normal((n, m))
    c = rng.standard_normal((p, n))
    return StateSpaceSystem(A=a, B=b, C=c)


def rand_spd(n, rng, spread=100.0):
    """Random symmetric positive definite matrix with eigenvalues in [1, spread]."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(0.0, np.log(spread), size=n))
    return q @ np.diag(lam) @ q.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def scalar_system():
    return StateSpaceSystem(A=[[-1.0]], B=[[1.0]], C=[[1.0]])
