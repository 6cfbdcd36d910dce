"""Semi-implicit upwind schemes for 2D linear advection.

The second-order and high-resolution relations are the 1D operators applied
dimension by dimension with per-axis Courant numbers C (x) and D (y) and
per-axis upwind signs sx, sy.  The third-order relation adds, on top of the
two 1D third-order operators, the mixed corrections

    sgn(D) |C|/12 ( D_ij  (dt-diff at (i, j))   - D_{i-sx, j}  (dt-diff at (i-sx, j)) )
    sgn(C) |D|/12 ( C_ij  (dt-diff at (i, j))   - C_up         (dt-diff at (i, j-sy)) )

where "dt-diff" is the upwind time difference
(Phi^n - Phi^n_shift) - (Phi' - Phi'_shift), shifted one node upwind in the
other axis.  The second correction samples the off-centre Courant number
``C_up`` at (i, j-sy) under the default symmetric reading, which makes the
x<->y swap map one correction onto the other; the alternative reading keeps
the sample at (i-sx, j) exactly as the formula family is sometimes written.
Both are available through ``cross_sampling``.

All implicit offsets stay in the upwind quadrant
{0, -sx, -2sx} x {0, -sy, -2sy}, including the mixed corner (-sx, -sy), so
the four alternating lexicographic sweeps solve the systems efficiently.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .grid import CourantField, Field, Grid
from .schemes1d import (
    LimiterState,
    SchemeParams,
    _base_dicts,
    _limit_recursive,
    _require_ghosts,
    _resolve_weight,
    accumulate_high_resolution,
    accumulate_second_order,
    accumulate_third_order,
    preferred_weight,
    sign_with_positive_zero,
)
from .system import StencilSystem

CROSS_SAMPLINGS = ("symmetric", "printed")


def _interior_index_arrays(grid: Grid):
    g = grid.ghost_width
    I, J = grid.node_counts
    ii = g + np.arange(I + 1)[:, None]
    jj = g + np.arange(J + 1)[None, :]
    return ii, jj


def _axis_signs(courant: CourantField, grid: Grid):
    C = courant.C[grid.interior]
    D = courant.D[grid.interior]
    return C, D, sign_with_positive_zero(C), sign_with_positive_zero(D)


def assemble_second_order_2d(
    grid: Grid,
    courant: CourantField,
    w_x,
    w_y,
    prev: Field | None = None,
    unknown_mask=None,
) -> StencilSystem:
    """Dimension-by-dimension parametric second-order relations."""
    _require_ghosts(grid, 2)
    C, D, sx, sy = _axis_signs(courant, grid)
    implicit, explicit = _base_dicts(grid)
    accumulate_second_order(
        implicit, explicit, np.abs(C), sx, _resolve_weight(w_x, np.abs(C)), dim=2, axis=0
    )
    accumulate_second_order(
        implicit, explicit, np.abs(D), sy, _resolve_weight(w_y, np.abs(D)), dim=2, axis=1
    )
    system = StencilSystem(grid, implicit, explicit, unknown_mask=unknown_mask)
    if prev is not None:
        system.compute_rhs(prev)
    return system


def _scatter_cross(target, coeff, mult, sx, sy):
    """Accumulate a symbolic offset (mult_x * sx, mult_y * sy) per node."""
    mx, my = mult
    for sxv in (1, -1):
        for syv in (1, -1):
            mask = (sx == sxv) & (sy == syv)
            if not mask.any():
                continue
            off = (mx * sxv, my * syv)
            add = np.where(mask, coeff, 0.0)
            if off in target:
                target[off] = target[off] + add
            else:
                target[off] = add


def _accumulate_cross(implicit, explicit, prefactor, near, far, mult_near, mult_far, sx, sy):
    """One mixed correction: prefactor * (near * delta_near - far * delta_far).

    ``delta_near`` is the upwind time difference between offset (0,0) and
    ``mult_near``; ``delta_far`` the one between ``mult_far`` and
    ``mult_far + mult_near``.  Implicit and explicit sides carry the same
    coefficient pattern because every group is a difference of time levels.
    """
    for target in (implicit, explicit):
        _scatter_cross(target, prefactor * near, (0, 0), sx, sy)
        _scatter_cross(target, -prefactor * near, mult_near, sx, sy)
        _scatter_cross(target, -prefactor * far, mult_far, sx, sy)
        _scatter_cross(
            target,
            prefactor * far,
            (mult_far[0] + mult_near[0], mult_far[1] + mult_near[1]),
            sx,
            sy,
        )


def assemble_third_order_2d(
    grid: Grid,
    courant: CourantField,
    prev: Field | None = None,
    unknown_mask=None,
    cross_sampling: str = "symmetric",
) -> StencilSystem:
    """Third-order relations: both 1D operators plus the mixed corrections."""
    _require_ghosts(grid, 2)
    if cross_sampling not in CROSS_SAMPLINGS:
        raise ConfigurationError(
            f"cross_sampling must be one of {CROSS_SAMPLINGS}, got {cross_sampling!r}"
        )
    C, D, sx, sy = _axis_signs(courant, grid)
    ii, jj = _interior_index_arrays(grid)
    C_upx = courant.C[ii - sx, jj]
    D_upy = courant.D[ii, jj - sy]
    implicit, explicit = _base_dicts(grid)
    accumulate_third_order(implicit, explicit, np.abs(C), sx, C_upx, dim=2, axis=0)
    accumulate_third_order(implicit, explicit, np.abs(D), sy, D_upy, dim=2, axis=1)

    # d/dx of the y-mixed term: D sampled at (i, j) and (i-sx, j)
    p1 = np.sign(D) * np.abs(C) / 12.0
    D_upx = courant.D[ii - sx, jj]
    _accumulate_cross(
        implicit, explicit, p1, D, D_upx, mult_near=(0, -1), mult_far=(-1, 0), sx=sx, sy=sy
    )
    # d/dy of the x-mixed term: C sampled at (i, j) and one node upwind
    p2 = np.sign(C) * np.abs(D) / 12.0
    if cross_sampling == "symmetric":
        C_far = courant.C[ii, jj - sy]
    else:
        C_far = C_upx
    _accumulate_cross(
        implicit, explicit, p2, C, C_far, mult_near=(-1, 0), mult_far=(0, -1), sx=sx, sy=sy
    )
    system = StencilSystem(grid, implicit, explicit, unknown_mask=unknown_mask)
    if prev is not None:
        system.compute_rhs(prev)
    return system


def _one_sided_state(prev: Field, predictor: Field, courant_comp, axis):
    """Predicted slope ratios and preliminary limits along one axis."""
    grid = prev.grid
    params = SchemeParams()
    Cax = courant_comp[grid.interior]
    cabs = np.abs(Cax)
    s = sign_with_positive_zero(Cax)
    ii, jj = _interior_index_arrays(grid)
    pv, pd = prev.values, predictor.values
    if axis == 0:
        up = lambda k: (ii - k * s, jj)  # noqa: E731
        dn = (ii + s, jj)
    else:
        up = lambda k: (ii, jj - k * s)  # noqa: E731
        dn = (ii, jj + s)
    num = pv[ii, jj] - pv[up(1)] - pd[up(1)] + pd[up(2)]
    den = pv[dn] - pv[ii, jj] - pd[ii, jj] + pd[up(1)]
    r_p = np.zeros_like(num)
    ok = np.abs(den) > params.epsilon_den * (1.0 + np.abs(num))
    r_p[ok] = num[ok] / den[ok]
    w = preferred_weight(cabs)
    s_p = 1.0 - w + w * r_p
    l_pre = np.maximum(0.0, np.minimum(s_p, params.limiter_cap))
    psi = pd[ii, jj] - pd[up(1)]
    return r_p, s_p, l_pre, cabs, s, psi, params


def limiter_pipeline_2d(prev: Field, predictor: Field, courant: CourantField, prescribed=None):
    """Axis-by-axis limiter states sharing the single 2D predictor."""
    grid = prev.grid
    _require_ghosts(grid, 2)
    states = []
    for axis, comp in ((0, courant.C), (1, courant.D)):
        r_p, s_p, l_pre, cabs, s, psi, params = _one_sided_state(prev, predictor, comp, axis)
        if axis == 0:
            reset = None if prescribed is None else prescribed.T
            l = _limit_recursive(
                l_pre.T, r_p.T, cabs.T, s.T, params.limiter_cap, reset=reset
            ).T
        else:
            l = _limit_recursive(
                l_pre, r_p, cabs, s, params.limiter_cap, reset=prescribed
            )
        states.append(LimiterState(r_p=r_p, s_p=s_p, l=l, psi=psi))
    return states[0], states[1]


def assemble_high_resolution_2d(
    grid: Grid,
    courant: CourantField,
    prev: Field,
    predictor: Field,
    limiter_x: LimiterState,
    limiter_y: LimiterState,
    unknown_mask=None,
) -> StencilSystem:
    """Corrector relations with both directional corrections sharing the
    single predictor; the limiter values are frozen, the system is linear."""
    _require_ghosts(grid, 2)
    C, D, sx, sy = _axis_signs(courant, grid)
    implicit, explicit = _base_dicts(grid)
    extra_x = accumulate_high_resolution(
        implicit, explicit, np.abs(C), sx, limiter_x.l, predictor, dim=2, axis=0
    )
    extra_y = accumulate_high_resolution(
        implicit, explicit, np.abs(D), sy, limiter_y.l, predictor, dim=2, axis=1
    )
    system = StencilSystem(
        grid, implicit, explicit, unknown_mask=unknown_mask, rhs_extra=extra_x + extra_y
    )
    system.compute_rhs(prev)
    return system
