import numpy as np
import pytest

from pilotwave.acceptance import Lab
from pilotwave.wavefield import SnapshotSeries


@pytest.fixture(scope="session")
def lab():
    """Shared acceptance lab: the expensive PDE runs are built once."""
    return Lab()


@pytest.fixture(scope="session")
def gaussian_series():
    """Freely spreading Gaussian packet with closed-form field and paths.

    sigma(t) = sigma0 sqrt(1 + (t / (2 sigma0^2))^2) and the guidance paths
    are the similarity flow x(t) = x0 sigma(t) / sigma0; independent of the
    Crank-Nicolson propagator.
    """
    s0 = 2.0
    x = np.linspace(-60.0, 60.0, 2401)
    times = np.linspace(0.0, 8.0, 161)
    vals = np.empty((len(times), len(x)), complex)
    for i, t in enumerate(times):
        z = 1.0 + 1j * t / (2.0 * s0**2)
        vals[i] = (2 * np.pi * s0**2) ** (-0.25) / np.sqrt(z) * np.exp(
            -(x**2) / (4.0 * s0**2 * z))
    series = SnapshotSeries(x[0], x[1] - x[0], times, vals)
    return series, s0
