"""Shared fixtures: small grids, kernels, and cached sample ensembles."""

import numpy as np
import pytest

from gmcarea.curves import sample_brownian
from gmcarea.field import CovarianceKernel
from gmcarea.gmc import sample_gmc
from gmcarea.grid import GridSpec, Polyline


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(-2.0, -2.0, 4 / 128, 128, 128)


@pytest.fixture(scope="session")
def unit_grid():
    return GridSpec(0.0, 0.0, 1 / 64, 64, 64)


@pytest.fixture(scope="session")
def small_kernel(small_grid):
    return CovarianceKernel(eps_reg=small_grid.h / 2)


@pytest.fixture(scope="session")
def unit_kernel(unit_grid):
    return CovarianceKernel(eps_reg=unit_grid.h / 2)


@pytest.fixture(scope="session")
def gmc_ensemble(small_kernel, small_grid):
    """Sixteen measure samples at gamma = 0.5 on the small grid."""
    return [sample_gmc(small_kernel, small_grid, 0.5, s) for s in range(16)]


@pytest.fixture(scope="session")
def brownian_loop():
    p = sample_brownian(2048, 424242)
    return Polyline(p.times, p.points, closed=True, kind="brownian", seed=p.seed)


def make_circle(radius=1.0, nv=512, center=(0.0, 0.0), clockwise=False):
    ang = 2 * np.pi * np.arange(nv) / nv
    if clockwise:
        ang = -ang
    pts = np.column_stack([center[0] + radius * np.cos(ang),
                           center[1] + radius * np.sin(ang)])
    return Polyline(np.arange(nv) / nv, pts, closed=True, kind="circle")
