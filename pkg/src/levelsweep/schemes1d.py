"""Semi-implicit upwind schemes for 1D linear advection.

All schemes discretize  d_t phi + u(x) d_x phi = 0  with nondimensional
Courant numbers C_i = tau*u_i/h and produce per-node relations whose implicit
part points strictly upwind: with s = sgn(C_i) (zero counts as +1), the
implicit offsets are a subset of {0, -s, -2s}.  The resulting matrices are
(block-)triangular whenever the velocity does not change sign against the
flow, which is what makes the sweeping solver exact in a few passes.

Schemes
-------
second order (parametric):
    Phi_i + |C_i| ( Phi_i - Phi_{i-s}
                    + (1-w_i)/2 (Phi_{i+s}' - Phi_i' - Phi_i + Phi_{i-s})
                    + w_i/2     (Phi_i' - Phi_{i-s}' - Phi_{i-s} + Phi_{i-2s}) )
        = Phi_i'
    with primes marking the previous time level.  Any w_i >= 0 is second
    order; w_i = (2+|C_i|)/6 is third order when the velocity is constant
    and is the preferred default.

third order:
    Phi_i + |C_i|/12 ( 9 Phi_i - 12 Phi_{i-s} + 3 Phi_{i-2s}
                       + 4 Phi_{i+s}' - 3 Phi_i' - Phi_{i-2s}'
                       + |C_i| (Phi_i - Phi_{i-s} - Phi_i' + Phi_{i-s}')
                       - s C_{i-s} (Phi_{i-s} - Phi_{i-2s}
                                    - Phi_{i-s}' + Phi_{i-2s}') ) = Phi_i'

high resolution (predictor-corrector):
    a provisional solve with the preferred weight supplies predicted values,
    a slope-ratio limiter produces per-node factors l_i in [0, 2], and the
    corrector relation
    Phi_i + |C_i| ( Phi_i - Phi_{i-s}
                    + l_i/2 (Phi_{i+s}' - Phi_i' - P_i + Phi_{i-s}) ) = Phi_i'
    stays linear because the predictor P enters only the right-hand side.
    The limiter keeps the total variation of the backward differences
    Psi_i = Phi_i - Phi_{i-1} from growing when the velocity is constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AssemblyError, ConfigurationError
from .grid import CourantField, Field, Grid
from .system import StencilSystem


def sign_with_positive_zero(c):
    """sgn(c) with sgn(0) := +1, so C = 0 degenerates to the identity relation."""
    return np.where(np.asarray(c) < 0, -1, 1).astype(np.int64)


def preferred_weight(courant_abs):
    """Space-dependent weight (2 + |C|)/6: third order for constant velocity."""
    return (2.0 + courant_abs) / 6.0


@dataclass
class SchemeParams:
    """Knobs of the parametric and high-resolution schemes."""

    limiter_cap: float = 2.0
    epsilon_den: float = 1e-14

    def __post_init__(self):
        if self.limiter_cap <= 0 or self.epsilon_den <= 0:
            raise ConfigurationError("limiter_cap and epsilon_den must be positive")


@dataclass
class LimiterState:
    """Per-node limiter data: predicted ratios, raw and limited slopes."""

    r_p: np.ndarray
    s_p: np.ndarray
    l: np.ndarray
    psi: np.ndarray


def _resolve_weight(w, courant_abs):
    if isinstance(w, str):
        if w != "preferred":
            raise ConfigurationError(f"unknown weight spec {w!r}")
        return preferred_weight(courant_abs)
    w_arr = np.broadcast_to(np.asarray(w, dtype=float), courant_abs.shape)
    if np.any(w_arr < 0):
        raise ConfigurationError("scheme weights must satisfy w >= 0")
    return w_arr


def _require_ghosts(grid: Grid, needed):
    if grid.ghost_width < needed:
        raise AssemblyError(
            f"stencil needs ghost_width >= {needed}, grid has {grid.ghost_width}"
        )


def _axis_offsets(dim, axis):
    """Offset factory: multiples of the unit step along one axis."""
    def off(mult):
        if dim == 1:
            return (int(mult),)
        o = [0, 0]
        o[axis] = int(mult)
        return tuple(o)
    return off


def accumulate_second_order(implicit, explicit, cabs, s, w, dim=1, axis=0):
    """Add the parametric second-order operator along one axis.

    Writes into the offset->array dicts; per-node upwind sign ``s`` selects
    the mirrored branch.  Offsets holding a per-node sign (like -s) are
    scattered into the two candidate static offsets with masks.
    """
    key = _axis_offsets(dim, axis)
    half = 0.5 * cabs
    diag = half * (1.0 + w)                 # |C| (1+w)/2
    up1 = -half * (1.0 + 2.0 * w)           # coefficient of Phi_{i-s}
    up2 = half * w                          # coefficient of Phi_{i-2s}
    exp_dn = -half * (1.0 - w)              # rhs coefficient of Phi_{i+s}'
    exp_0 = -half * (2.0 * w - 1.0)         # rhs coefficient of Phi_i' (on top of the unit term)
    exp_up = half * w                       # rhs coefficient of Phi_{i-s}'
    _scatter(implicit, key, s, {0: diag, -1: up1, -2: up2})
    _scatter(explicit, key, s, {1: exp_dn, 0: exp_0, -1: exp_up})


def accumulate_third_order(implicit, explicit, cabs, s, c_up, dim=1, axis=0):
    """Add the third-order operator along one axis.

    ``c_up`` is the signed Courant number sampled at the upwind neighbour
    i-s (per node), entering through the mixed-derivative correction.
    """
    key = _axis_offsets(dim, axis)
    f = cabs / 12.0
    sq = s * c_up
    _scatter(
        implicit,
        key,
        s,
        {
            0: f * (9.0 + cabs),
            -1: f * (-12.0 - cabs - sq),
            -2: f * (3.0 + sq),
        },
    )
    _scatter(
        explicit,
        key,
        s,
        {
            1: -4.0 * f,
            0: f * (3.0 + cabs),
            -1: -f * (cabs + sq),
            -2: f * (1.0 + sq),
        },
    )


def _scatter(target, key, s, contributions):
    """Accumulate sign-dependent offsets: multiples of s become static keys."""
    pos = s > 0
    for mult, coeff in contributions.items():
        coeff = np.asarray(coeff)
        if mult == 0:
            _add(target, key(0), coeff)
            continue
        _add(target, key(mult), np.where(pos, coeff, 0.0))
        _add(target, key(-mult), np.where(pos, 0.0, coeff))


def _add(target, off, arr):
    if off in target:
        target[off] = target[off] + arr
    else:
        target[off] = np.array(arr, dtype=float)


def _base_dicts(grid: Grid):
    one = np.ones(grid.shape_interior)
    implicit = {(0,) * grid.dim: one.copy()}
    explicit = {(0,) * grid.dim: one.copy()}
    return implicit, explicit


def assemble_second_order(
    grid: Grid,
    courant: CourantField,
    w,
    prev: Field | None = None,
    unknown_mask=None,
) -> StencilSystem:
    """Parametric second-order relations over the interior nodes.

    ``w`` is a scalar, a per-node array, or the string ``"preferred"`` for
    (2+|C|)/6.  When ``prev`` is given the right-hand side is evaluated
    immediately; otherwise call ``compute_rhs`` later (the coefficients only
    depend on the Courant numbers).
    """
    _require_ghosts(grid, 2)
    C = courant.C[grid.interior]
    cabs = np.abs(C)
    s = sign_with_positive_zero(C)
    w_arr = _resolve_weight(w, cabs)
    implicit, explicit = _base_dicts(grid)
    accumulate_second_order(implicit, explicit, cabs, s, w_arr)
    system = StencilSystem(grid, implicit, explicit, unknown_mask=unknown_mask)
    if prev is not None:
        system.compute_rhs(prev)
    return system


def assemble_third_order(
    grid: Grid,
    courant: CourantField,
    prev: Field | None = None,
    unknown_mask=None,
) -> StencilSystem:
    """Third-order relations; needs Courant numbers at the upwind neighbours."""
    _require_ghosts(grid, 2)
    g = grid.ghost_width
    C = courant.C[grid.interior]
    cabs = np.abs(C)
    s = sign_with_positive_zero(C)
    n = grid.node_counts[0]
    idx = np.arange(n + 1)
    c_up = courant.C[g + idx - s]
    implicit, explicit = _base_dicts(grid)
    accumulate_third_order(implicit, explicit, cabs, s, c_up)
    system = StencilSystem(grid, implicit, explicit, unknown_mask=unknown_mask)
    if prev is not None:
        system.compute_rhs(prev)
    return system


def predict_step(
    grid: Grid,
    courant: CourantField,
    prev: Field,
    guess: Field,
    n_iters: int,
    unknown_mask=None,
    orderings=None,
) -> Field:
    """Provisional solve with the preferred weight, feeding the limiter.

    ``guess`` must already carry the new-time ghost and inflow values; it is
    copied, solved in place with the same sweep schedule as the corrector,
    and returned.
    """
    from .solver import sweep_solve

    system = assemble_second_order(grid, courant, "preferred", prev, unknown_mask)
    predictor = guess.copy()
    return sweep_solve(system, predictor, n_iters, orderings)


def limiter_pipeline(
    prev: Field,
    predictor: Field,
    courant: CourantField,
    params: SchemeParams | None = None,
    prescribed=None,
) -> LimiterState:
    """Slope limiting for the high-resolution corrector.

    Per node (upwind sign s, prime = previous level, P = predictor):

        r_i = (Phi_i' - Phi_{i-s}' - P_{i-s} + P_{i-2s})
              / (Phi_{i+s}' - Phi_i' - P_i + P_{i-s})
        l_i = max(0, min( max(0, min(1 - w_i + w_i r_i, 2)),
                          (2/|C_i| + l_{i-s}) r_i ))

    with w_i the preferred weight.  The recursion runs in upwind order so
    l_{i-s} is final before l_i; each monotone velocity run is seeded with
    l = 0 at its inflow end, and nodes in ``prescribed`` (inflow Dirichlet
    nodes, outside the solved system) restart the chain the same way.  A
    vanishing denominator (within the scale-aware guard) forces r_i = 0 and
    hence l_i = 0.
    """
    if params is None:
        params = SchemeParams()
    grid = prev.grid
    _require_ghosts(grid, 2)
    C = courant.C[grid.interior]
    cabs = np.abs(C)
    s = sign_with_positive_zero(C)
    g = grid.ghost_width
    n = grid.node_counts[0]
    idx = g + np.arange(n + 1)
    pv = prev.values
    pd = predictor.values

    num = pv[idx] - pv[idx - s] - pd[idx - s] + pd[idx - 2 * s]
    den = pv[idx + s] - pv[idx] - pd[idx] + pd[idx - s]
    r_p = np.zeros_like(num)
    ok = np.abs(den) > params.epsilon_den * (1.0 + np.abs(num))
    r_p[ok] = num[ok] / den[ok]

    w = preferred_weight(cabs)
    s_p = 1.0 - w + w * r_p
    l_pre = np.maximum(0.0, np.minimum(s_p, params.limiter_cap))
    l = _limit_recursive(l_pre, r_p, cabs, s, params.limiter_cap, reset=prescribed)
    psi = backward_differences(predictor)
    return LimiterState(r_p=r_p, s_p=s_p, l=l, psi=psi)


def _limit_recursive(l_pre, r_p, cabs, s, cap, reset=None):
    """Apply l_i = max(0, min(l_i^pre, (cap/|C_i| + l_{i-s}) r_i)) upwind-first.

    Works on 1D arrays or row-stacked 2D arrays (the recursion runs along the
    last axis, vectorized over rows).  An ascending pass handles the s = +1
    runs, a descending pass the s = -1 runs; a run is seeded with l = 0 where
    its upwind neighbour belongs to the other monotone run, to the edge, or
    to the ``reset`` set (prescribed nodes, whose l is pinned to 0).
    """
    flat = l_pre.ndim == 1
    if flat:
        l_pre, r_p, cabs, s = (a[None, :] for a in (l_pre, r_p, cabs, s))
        if reset is not None:
            reset = reset[None, :]
    if reset is None:
        reset = np.zeros(l_pre.shape, dtype=bool)
    n = l_pre.shape[1]
    l = np.zeros_like(l_pre)
    ca_safe = np.where(cabs > 0.0, cabs, 1.0)

    def limited(i, l_up):
        lp = l_pre[:, i]
        r = r_p[:, i]
        bound = (cap / ca_safe[:, i] + l_up) * r
        out = np.maximum(0.0, np.minimum(lp, bound))
        out = np.where(cabs[:, i] == 0.0, np.where(r > 0.0, lp, 0.0), out)
        return np.where(r > 0.0, out, 0.0)

    zeros = np.zeros(l_pre.shape[0])
    for i in range(n):
        active = (s[:, i] > 0) & ~reset[:, i]
        if active.any():
            l_up = (
                np.where((s[:, i - 1] > 0) & ~reset[:, i - 1], l[:, i - 1], 0.0)
                if i > 0
                else zeros
            )
            l[:, i] = np.where(active, limited(i, l_up), l[:, i])
    for i in range(n - 1, -1, -1):
        active = (s[:, i] < 0) & ~reset[:, i]
        if active.any():
            l_up = (
                np.where((s[:, i + 1] < 0) & ~reset[:, i + 1], l[:, i + 1], 0.0)
                if i < n - 1
                else zeros
            )
            l[:, i] = np.where(active, limited(i, l_up), l[:, i])
    return l[0] if flat else l


def assemble_high_resolution(
    grid: Grid,
    courant: CourantField,
    prev: Field,
    predictor: Field,
    limiter: LimiterState,
    unknown_mask=None,
) -> StencilSystem:
    """Corrector relations with frozen limiter values (linear system)."""
    _require_ghosts(grid, 2)
    C = courant.C[grid.interior]
    cabs = np.abs(C)
    s = sign_with_positive_zero(C)
    implicit, explicit = _base_dicts(grid)
    rhs_extra = accumulate_high_resolution(
        implicit, explicit, cabs, s, limiter.l, predictor
    )
    system = StencilSystem(
        grid, implicit, explicit, unknown_mask=unknown_mask, rhs_extra=rhs_extra
    )
    system.compute_rhs(prev)
    return system


def accumulate_high_resolution(implicit, explicit, cabs, s, l, predictor, dim=1, axis=0):
    """Add the limited corrector terms along one axis; returns the rhs part
    contributed by the predictor values at the nodes themselves."""
    key = _axis_offsets(dim, axis)
    half_l = 0.5 * cabs * l
    _scatter(implicit, key, s, {0: cabs, -1: -cabs + half_l})
    _scatter(explicit, key, s, {1: -half_l, 0: half_l})
    grid = predictor.grid
    pred_center = predictor.values[grid.interior]
    return half_l * pred_center


def backward_differences(field: Field, forward: bool = False) -> np.ndarray:
    """Undivided differences Psi_i = Phi_i - Phi_{i-1} over interior nodes.

    ``forward=True`` mirrors the orientation (Phi_{i+1} - Phi_i), the
    conservative counterpart used when the velocity is negative.
    """
    grid = field.grid
    _require_ghosts(grid, 1)
    g = grid.ghost_width
    n = grid.node_counts[0]
    idx = g + np.arange(n + 1)
    v = field.values
    if forward:
        return v[idx + 1] - v[idx]
    return v[idx] - v[idx - 1]
