"""Uniform structured grids, fields with ghost layers, and Courant numbers.

Grids are uniform with a single spacing h shared by both axes in 2D.  Nodes
are indexed 0..I per axis; every array carries an extra ghost margin of
`ghost_width` nodes on each side so that compact upwind stencils (reaching
two nodes upwind and one node downwind) never index out of range.  Ghost and
inflow-boundary values are prescribed data, never unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class GridSpec:
    """Geometry and time-stepping parameters of a uniform grid.

    dim         : 1 or 2
    origin      : coordinate of node 0 per axis
    h           : uniform node spacing (> 0), same on both axes in 2D
    node_counts : I per axis; nodes are indexed 0..I (I+1 nodes per axis)
    ghost_width : number of ghost nodes added on every side (>= 0)
    tau         : time step (> 0), or a sequence of per-step values
    n_steps     : number of time steps N (>= 1)
    """

    dim: int
    origin: tuple[float, ...]
    h: float
    node_counts: tuple[int, ...]
    ghost_width: int = 2
    tau: float | Sequence[float] = 1.0
    n_steps: int = 1

    @classmethod
    def from_bounds(cls, bounds, n_cells, ghost_width=2, tau=1.0, n_steps=1):
        """Build a spec from per-axis (lo, hi) bounds and the cell count I.

        ``h`` is (hi - lo) / I, identical on every axis; mismatched extents
        raise a configuration error.
        """
        bounds = np.atleast_2d(np.asarray(bounds, dtype=float))
        dim = bounds.shape[0]
        if np.isscalar(n_cells):
            n_cells = (int(n_cells),) * dim
        n_cells = tuple(int(n) for n in n_cells)
        spans = bounds[:, 1] - bounds[:, 0]
        hs = spans / np.asarray(n_cells, dtype=float)
        if not np.allclose(hs, hs[0], rtol=1e-12, atol=0.0):
            raise ConfigurationError(f"axes must share one spacing, got {hs}")
        return cls(
            dim=dim,
            origin=tuple(bounds[:, 0]),
            h=float(hs[0]),
            node_counts=n_cells,
            ghost_width=ghost_width,
            tau=tau,
            n_steps=n_steps,
        )

    def taus(self):
        """Per-step time steps as an array of length n_steps."""
        if np.isscalar(self.tau):
            return np.full(self.n_steps, float(self.tau))
        arr = np.asarray(self.tau, dtype=float)
        if arr.shape != (self.n_steps,):
            raise ConfigurationError(
                f"tau ladder length {arr.shape} does not match n_steps={self.n_steps}"
            )
        return arr


class Grid:
    """Realized grid: coordinates addressable by index, ghosts included."""

    def __init__(self, spec: GridSpec):
        if spec.dim not in (1, 2):
            raise ConfigurationError(f"dim must be 1 or 2, got {spec.dim}")
        if not spec.h > 0:
            raise ConfigurationError(f"spacing h must be positive, got {spec.h}")
        taus = np.atleast_1d(np.asarray(spec.tau, dtype=float))
        if not np.all(taus > 0):
            raise ConfigurationError(f"time step tau must be positive, got {spec.tau}")
        if spec.n_steps < 1:
            raise ConfigurationError(f"n_steps must be >= 1, got {spec.n_steps}")
        if spec.ghost_width < 0:
            raise ConfigurationError("ghost_width must be >= 0")
        if len(spec.origin) != spec.dim or len(spec.node_counts) != spec.dim:
            raise ConfigurationError("origin/node_counts length must equal dim")
        self.spec = spec
        self.dim = spec.dim
        self.h = spec.h
        self.ghost_width = spec.ghost_width
        self.node_counts = spec.node_counts
        g = spec.ghost_width
        self.shape_full = tuple(n + 1 + 2 * g for n in spec.node_counts)
        self.shape_interior = tuple(n + 1 for n in spec.node_counts)
        self._axes_full = tuple(
            spec.origin[a] + spec.h * np.arange(-g, spec.node_counts[a] + g + 1)
            for a in range(spec.dim)
        )

    # -- indexing ---------------------------------------------------------

    @property
    def interior(self):
        """Slices selecting interior nodes 0..I out of a full-extent array."""
        g = self.ghost_width
        return tuple(slice(g, g + n + 1) for n in self.node_counts)

    def axis_coords(self, axis=0, ghosts=False):
        """Node coordinates along one axis (interior by default)."""
        full = self._axes_full[axis]
        if ghosts:
            return full
        g = self.ghost_width
        return full[g : g + self.node_counts[axis] + 1]

    def coord(self, index):
        """Coordinate(s) of a node given its interior index (ghosts allowed)."""
        index = np.atleast_1d(index)
        return tuple(
            self.spec.origin[a] + self.h * index[a] for a in range(self.dim)
        )

    def index_of(self, point):
        """Nearest node index of a coordinate tuple; inverse of ``coord``."""
        point = np.atleast_1d(point)
        return tuple(
            int(round((point[a] - self.spec.origin[a]) / self.h))
            for a in range(self.dim)
        )

    def meshgrid(self, ghosts=True):
        """Coordinate arrays over the full (default) or interior extent."""
        axes = [self.axis_coords(a, ghosts=True) for a in range(self.dim)]
        if not ghosts:
            axes = [self.axis_coords(a) for a in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return np.meshgrid(axes[0], axes[1], indexing="ij")

    def zeros_full(self):
        return np.zeros(self.shape_full)


def build_grid(spec: GridSpec) -> Grid:
    """Validate a spec and realize the grid (ghost nodes included)."""
    return Grid(spec)


class Field:
    """A time-level snapshot of the discrete solution, ghosts included."""

    __slots__ = ("grid", "values", "time_index")

    def __init__(self, grid: Grid, values: np.ndarray, time_index: int = 0):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape_full:
            raise ConfigurationError(
                f"field shape {values.shape} != grid extent {grid.shape_full}"
            )
        self.grid = grid
        self.values = values
        self.time_index = time_index

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable, t: float = 0.0, time_index: int = 0):
        """Sample ``fn(x[, y], t)`` on interior and ghost nodes."""
        coords = grid.meshgrid(ghosts=True)
        return cls(grid, np.asarray(fn(*coords, t), dtype=float), time_index)

    @property
    def interior(self):
        """View of the interior nodes 0..I (no ghosts)."""
        return self.values[self.grid.interior]

    def copy(self, time_index=None):
        return Field(
            self.grid,
            self.values.copy(),
            self.time_index if time_index is None else time_index,
        )

    def all_finite(self):
        return bool(np.isfinite(self.values).all())


@dataclass
class CourantField:
    """Per-node Courant numbers C = tau*u/h (and D = tau*v/h in 2D).

    Arrays span the full extent so near-boundary stencils can sample the
    upwind-neighbour Courant number inside the first ghost ring.
    """

    grid: Grid
    tau: float
    C: np.ndarray
    D: np.ndarray | None = None
    max_magnitude: float = dataclass_field(init=False, default=0.0)

    def __post_init__(self):
        mags = np.abs(self.C[self.grid.interior])
        if self.D is not None:
            mags = np.maximum(mags, np.abs(self.D[self.grid.interior]))
        self.max_magnitude = float(mags.max()) if mags.size else 0.0


def courant_numbers(grid: Grid, u, v=None, tau=None) -> CourantField:
    """Nondimensional Courant numbers tau*velocity/h from sampled velocity.

    ``u`` (and ``v`` in 2D) must be sampled on the full extent, interior plus
    ghosts.  The field records the maximal magnitude over interior nodes; the
    caller accumulates the maximum over time steps when the velocity changes.
    """
    if tau is None:
        tau = float(np.atleast_1d(np.asarray(grid.spec.tau, dtype=float))[0])
    u = np.asarray(u, dtype=float)
    C = tau * u / grid.h
    D = None
    if grid.dim == 2:
        if v is None:
            raise ConfigurationError("2D grids need both velocity components")
        D = tau * np.asarray(v, dtype=float) / grid.h
    return CourantField(grid=grid, tau=tau, C=C, D=D)


def inflow_mask(grid: Grid, courant: CourantField) -> np.ndarray:
    """Boolean interior mask of boundary nodes where the flow enters the domain.

    A boundary node is inflow when the velocity component normal to its edge
    points into the domain (strictly); corners count as inflow when either of
    their edges does.  Inflow nodes carry prescribed values and stay out of
    the solved system.
    """
    mask = np.zeros(grid.shape_interior, dtype=bool)
    C_int = courant.C[grid.interior]
    if grid.dim == 1:
        mask[0] = C_int[0] > 0
        mask[-1] = C_int[-1] < 0
        return mask
    D_int = courant.D[grid.interior]
    mask[0, :] |= C_int[0, :] > 0
    mask[-1, :] |= C_int[-1, :] < 0
    mask[:, 0] |= D_int[:, 0] > 0
    mask[:, -1] |= D_int[:, -1] < 0
    return mask


def inject_boundary(field: Field, case, t: float, courant: CourantField | None = None) -> Field:
    """Write prescribed values at time ``t`` into ghosts and inflow nodes.

    The benchmark policy is to take exact-solution values on every ghost node
    and on all inflow boundary nodes (determined from ``courant`` when given,
    otherwise from the case's external velocity).  Cases without an exact
    solution may declare ``boundary_rule='extrapolate'``, which copies the
    nearest interior value outward instead; such cases cannot prescribe
    inflow values and raise a configuration error if an inflow edge exists.
    Interior non-boundary nodes are never touched; repeated injection at a
    fixed ``t`` is idempotent.
    """
    grid = field.grid
    rule = getattr(case, "boundary_rule", "exact")
    exact = getattr(case, "exact", None)
    if rule == "exact" and exact is None:
        raise ConfigurationError(f"case {getattr(case, 'id', case)!r} has no exact solution")

    if courant is None:
        u, v = _sample_external_velocity(grid, case)
        courant = courant_numbers(grid, u, v)
    inflow = inflow_mask(grid, courant)

    if rule == "exact":
        coords = grid.meshgrid(ghosts=True)
        prescribed = np.asarray(exact(*coords, t), dtype=float)
        ghost = np.ones(grid.shape_full, dtype=bool)
        ghost[grid.interior] = False
        field.values[ghost] = prescribed[ghost]
        field.interior[inflow] = prescribed[grid.interior][inflow]
        return field
    if rule == "extrapolate":
        if inflow.any():
            raise ConfigurationError(
                "extrapolating boundary rule cannot serve inflow edges"
            )
        _extrapolate_ghosts(field)
        return field
    raise ConfigurationError(f"unknown boundary rule {rule!r}")


def _sample_external_velocity(grid: Grid, case):
    coords = grid.meshgrid(ghosts=True)
    model = getattr(case, "velocity", None)
    if model is None:
        raise ConfigurationError("case carries no velocity model")
    if grid.dim == 1:
        return np.asarray(model.external(coords[0]), dtype=float), None
    ext = model.external(coords[0], coords[1])
    return np.asarray(ext[0], dtype=float), np.asarray(ext[1], dtype=float)


def _extrapolate_ghosts(field: Field):
    """Fill ghosts with the nearest interior value (constant extension)."""
    g = field.grid.ghost_width
    if g == 0:
        return
    vals = field.values
    for axis in range(field.grid.dim):
        n = vals.shape[axis]
        lo = [slice(None)] * vals.ndim
        hi = [slice(None)] * vals.ndim
        src_lo = [slice(None)] * vals.ndim
        src_hi = [slice(None)] * vals.ndim
        lo[axis] = slice(0, g)
        src_lo[axis] = slice(g, g + 1)
        hi[axis] = slice(n - g, n)
        src_hi[axis] = slice(n - g - 1, n - g)
        vals[tuple(lo)] = vals[tuple(src_lo)]
        vals[tuple(hi)] = vals[tuple(src_hi)]


# -- CSV snapshots ---------------------------------------------------------

def write_snapshot(field: Field, path, t: float):
    """Serialize the interior of a field as CSV: ``# t=<time>`` then rows
    ``i,x,value`` (1D) or ``i,j,x,y,value`` (2D) in row-major order."""
    grid = field.grid
    with open(path, "w") as fh:
        fh.write(f"# t={t:.12g}\n")
        vals = field.interior
        if grid.dim == 1:
            xs = grid.axis_coords(0)
            for i, (x, v) in enumerate(zip(xs, vals)):
                fh.write(f"{i},{x:.12g},{v:.12g}\n")
        else:
            xs = grid.axis_coords(0)
            ys = grid.axis_coords(1)
            for i in range(vals.shape[0]):
                for j in range(vals.shape[1]):
                    fh.write(f"{i},{j},{xs[i]:.12g},{ys[j]:.12g},{vals[i, j]:.12g}\n")


def read_snapshot(path):
    """Read a snapshot written by ``write_snapshot``; returns (t, indices, values)."""
    with open(path) as fh:
        header = fh.readline().strip()
        t = float(header.split("=", 1)[1])
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.asarray(rows, dtype=float)
    return t, data[:, :-1], data[:, -1]
