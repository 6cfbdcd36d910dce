import numpy as np
import pytest

from levelsweep import (
    Field,
    VelocityModel,
    assemble_velocity,
    upwind_gradient,
    weno_one_sided,
)
from conftest import line_grid, square_grid


def test_one_sided_reconstruction_exact_on_linear_data():
    grid = line_grid(I=20, h=0.1, origin=0.0)
    x = grid.meshgrid()[0]
    vals = 2.5 * x - 0.7
    for d in (1, -1):
        recon = weno_one_sided(vals, 0, d, eps=1e-7)
        inner = slice(2, -2)
        assert np.allclose(recon[inner], vals[inner] + d * 2.5 * 0.1, atol=1e-13)


def test_one_sided_weight_limit_on_quadratic_data():
    # equal curvatures force the smoothness ratio to one, hence w = 1/3
    grid = line_grid(I=20, h=0.1, origin=-1.0)
    x = grid.meshgrid()[0]
    vals = x**2
    _, w = weno_one_sided(vals, 0, 1, eps=1e-9, return_weight=True)
    inner = slice(2, -2)
    assert np.allclose(w[inner], 1.0 / 3.0, atol=1e-6)


def test_one_sided_reconstruction_suppresses_kink_crossing():
    grid = line_grid(I=40, h=0.05, origin=-1.0)
    x = grid.meshgrid()[0]
    vals = np.abs(x)
    recon_right = weno_one_sided(vals, 0, 1, eps=1e-7)
    k = grid.ghost_width + grid.index_of((-0.35,))[0]
    # away from the kink on smooth one-sided data the value is reproduced
    assert recon_right[k] == pytest.approx(np.abs(x[k] + 0.05), abs=1e-10)
    # right next to the kink the reconstruction stays bounded by the
    # one-sided values instead of overshooting
    k0 = grid.ghost_width + grid.index_of((0.0,))[0]
    assert abs(recon_right[k0 - 1]) <= 0.051


def test_upwind_gradient_on_distance_function():
    grid = square_grid(I=64, bounds=((-0.5, 0.5), (-0.5, 0.5)), tau=0.1)
    X, Y = grid.meshgrid()
    prev = Field(grid, np.sqrt((X - 0.03) ** 2 + (Y + 0.02) ** 2))
    gx, gy = upwind_gradient(prev)
    norm = np.sqrt(gx**2 + gy**2) / grid.h
    ii = grid.interior
    r = np.sqrt((X - 0.03) ** 2 + (Y + 0.02) ** 2)[ii]
    away = r > 0.15
    dev = np.abs(norm[ii][away] - 1.0)
    assert dev.max() < 5e-3  # one-sided O(h^2) reconstruction of a unit gradient


def test_upwind_gradient_zero_at_local_minimum_and_peak():
    grid = line_grid(I=20, h=0.1, origin=-1.0)
    # build bitwise-symmetric data around the centre node in index space
    k = grid.ghost_width + 10
    offsets = np.arange(grid.shape_full[0]) - k
    vmin = Field(grid, (offsets * 0.1) ** 2)  # minimum at the centre node
    (gx,) = upwind_gradient(vmin)
    assert gx[k] == 0.0
    tent = Field(grid, -np.abs(offsets * 0.1))  # symmetric peak
    (gt,) = upwind_gradient(tent)
    assert gt[k] == 0.0


def test_delta_zero_is_bitwise_external(rng):
    grid = square_grid(I=12)
    model = VelocityModel(external=lambda x, y: (np.sin(x), np.cos(y)), delta=0.0)
    prev = Field(grid, rng.normal(size=grid.shape_full))
    u, v = assemble_velocity(prev, model)
    X, Y = grid.meshgrid()
    assert np.array_equal(np.asarray(u), np.sin(X))
    assert np.array_equal(np.asarray(v), np.cos(Y))


def test_normal_speed_adds_unit_normal_times_delta():
    grid = square_grid(I=64, bounds=((-0.5, 0.5), (-0.5, 0.5)), tau=0.1, ghost=3)
    X, Y = grid.meshgrid()
    delta = -0.1 / np.pi
    model = VelocityModel(external=lambda x, y: (-y, x), delta=delta)
    prev = Field(grid, np.sqrt((X + 0.25) ** 2 + Y**2))
    u, v = assemble_velocity(prev, model)
    # probe a point well away from the cone apex
    i, j = grid.ghost_width + 8, grid.ghost_width + 40
    r = np.sqrt((X[i, j] + 0.25) ** 2 + Y[i, j] ** 2)
    nx, ny = (X[i, j] + 0.25) / r, Y[i, j] / r
    assert u[i, j] == pytest.approx(-Y[i, j] + delta * nx, abs=2e-3)
    assert v[i, j] == pytest.approx(X[i, j] + delta * ny, abs=2e-3)


def test_zero_gradient_keeps_external_velocity(rng):
    grid = square_grid(I=10, ghost=3)
    model = VelocityModel(external=lambda x, y: (np.ones_like(x), np.zeros_like(y)), delta=0.3)
    prev = Field(grid, np.full(grid.shape_full, 1.25))  # flat: gradient 0 everywhere
    u, v = assemble_velocity(prev, model)
    assert np.allclose(u, 1.0)
    assert np.allclose(v, 0.0)
