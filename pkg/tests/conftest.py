import numpy as np
import pytest

from levelsweep import Field, GridSpec, build_grid, courant_numbers


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def line_grid(I=40, h=0.1, origin=0.0, ghost=2, tau=0.2, n_steps=1):
    spec = GridSpec(
        dim=1, origin=(origin,), h=h, node_counts=(I,), ghost_width=ghost,
        tau=tau, n_steps=n_steps,
    )
    return build_grid(spec)


def square_grid(I=16, bounds=((0.0, 1.0), (0.0, 1.0)), ghost=2, tau=0.1, n_steps=1):
    spec = GridSpec.from_bounds(bounds, I, ghost_width=ghost, tau=tau, n_steps=n_steps)
    return build_grid(spec)


def constant_courant(grid, c, d=None):
    """Courant field with the requested constant values (h, tau ignored)."""
    tau = float(np.atleast_1d(grid.spec.taus())[0])
    u = np.full(grid.shape_full, c * grid.h / tau)
    if grid.dim == 1:
        return courant_numbers(grid, u)
    v = np.full(grid.shape_full, (d if d is not None else c) * grid.h / tau)
    return courant_numbers(grid, u, v)


def random_field(grid, rng, scale=1.0):
    return Field(grid, scale * rng.normal(size=grid.shape_full))


def periodic_embed(grid, nodal):
    """Field whose interior wraps the length-I periodic nodal values."""
    I = grid.node_counts[0]
    g = grid.ghost_width
    assert g == 2 and len(nodal) == I
    full = np.empty(grid.shape_full)
    full[g : g + I] = nodal
    full[g + I] = nodal[0]
    full[0:g] = nodal[I - g : I]
    full[g + I + 1 :] = nodal[1 : 1 + g]
    return Field(grid, full)


def periodic_dense_solve(system, prev):
    """Exact solve of a 1D relation set folded periodically (period I)."""
    I = system.grid.node_counts[0]
    rhs = system.compute_rhs(prev)
    A = np.zeros((I, I))
    for k in range(I):
        for off, arr in system.implicit.items():
            A[k, (k + off[0]) % I] += arr[k]
    return np.linalg.solve(A, rhs[:I])
