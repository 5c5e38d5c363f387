"""Shared fixtures and closed-form reference propagators."""

import numpy as np
import pytest

from dg_gauge import Wavefunction


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


def free_linear_propagate(psi0: Wavefunction, nu1: float, t: float) -> Wavefunction:
    """Exact solution of the free linear equation d/dt psi = -i nu1 Lap psi.

    On the periodic grid every Fourier mode just rotates:
    psi_hat(k, t) = exp(i nu1 k^2 t) psi_hat(k, 0).
    """
    grid = psi0.grid
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.spacing)
    spectrum = np.fft.fft(psi0.values)
    return Wavefunction(grid, np.fft.ifft(np.exp(1j * nu1 * k * k * t) * spectrum))
