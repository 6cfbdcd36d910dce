"""Numerical von Neumann analysis of the frozen-coefficient schemes.

For constant velocity the schemes reduce to two-level constant-coefficient
relations; inserting the Fourier mode Phi_j^n = g^n exp(i j theta) turns a
relation with implicit coefficients a_off and explicit coefficients b_off
into the amplification factor

    g(theta) = sum_off b_off e^{i off.theta} / sum_off a_off e^{i off.theta}.

A scheme is von Neumann stable when |g| <= 1 for all frequencies.  Frozen
stencils are extracted programmatically from the scheme assemblers evaluated
at an interior node of a tiny constant-velocity grid, so the scanned symbol
is byte-identical to what the solver runs; nothing is transcribed by hand.

The scanner takes a coarse frequency grid, then repeatedly shrinks a window
around the running argmax (the reported maximum never decreases across
rounds because the window always contains the previous argmax).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import schemes1d, schemes2d
from .errors import ConfigurationError, DegenerateSymbolError
from .grid import GridSpec, build_grid, courant_numbers

SCHEME_IDS = ("first", "second", "third", "second2d", "third2d")


@dataclass
class FrozenStencil:
    """Constant-coefficient relation: offset -> coefficient maps."""

    scheme_id: str
    dim: int
    courant: tuple[float, ...]
    implicit: dict
    explicit: dict

    def __post_init__(self):
        zero = (0,) * self.dim
        if self.implicit.get(zero, 0.0) < 1.0 - 1e-12:
            raise ConfigurationError("frozen stencil lost its unit diagonal")


@dataclass
class AmplificationReport:
    """Result of a magnitude scan over Courant numbers and frequencies."""

    scheme_id: str
    dim: int
    courant_range: tuple[float, float]
    freq_resolution: int
    refine_steps: int
    max_abs_g: float = 0.0
    argmax: tuple = ()
    rows: list = dataclass_field(default_factory=list)
    round_maxima: list = dataclass_field(default_factory=list)

    def csv_lines(self):
        lines = ["C,D,max_abs_g,theta1,theta2"]
        for row in self.rows:
            C, D, m, t1, t2 = row
            lines.append(f"{C:.10g},{D:.10g},{m:.12g},{t1:.10g},{t2:.10g}")
        return lines


def _normalize_scheme(scheme_id, dim=None):
    s = scheme_id.lower()
    if s.endswith("2d"):
        base, d = s[:-2], 2
    else:
        base, d = s, dim or 1
    if base not in ("first", "second", "third", "hr0"):
        raise ConfigurationError(f"unknown scheme {scheme_id!r} for stability analysis")
    if base == "hr0":
        base = "first"
    return base, d


def freeze_scheme(scheme_id, C, D=None, w=0.5) -> FrozenStencil:
    """Extract the constant-coefficient relation of a scheme assembler.

    ``C`` (and ``D`` in 2D) are the frozen Courant numbers; ``w`` applies to
    the parametric second-order scheme (value or "preferred").  The stencil
    is read off the centre node of a small grid with the matching constant
    velocity.
    """
    base, dim = _normalize_scheme(scheme_id, dim=2 if D is not None else 1)
    if dim == 2 and D is None:
        D = C
    n = 8
    tau = 1.0
    h = 1.0
    if dim == 1:
        spec = GridSpec(dim=1, origin=(0.0,), h=h, node_counts=(n,), ghost_width=2, tau=tau)
        grid = build_grid(spec)
        u = np.full(grid.shape_full, C * h / tau)
        cf = courant_numbers(grid, u)
        if base == "second":
            system = schemes1d.assemble_second_order(grid, cf, w)
        elif base == "third":
            system = schemes1d.assemble_third_order(grid, cf)
        else:
            system = _first_order_system(grid, cf)
        centre = (n // 2,)
    else:
        spec = GridSpec(dim=2, origin=(0.0, 0.0), h=h, node_counts=(n, n), ghost_width=2, tau=tau)
        grid = build_grid(spec)
        u = np.full(grid.shape_full, C * h / tau)
        v = np.full(grid.shape_full, D * h / tau)
        cf = courant_numbers(grid, u, v)
        if base == "second":
            system = schemes2d.assemble_second_order_2d(grid, cf, w, w)
        elif base == "third":
            system = schemes2d.assemble_third_order_2d(grid, cf)
        else:
            system = _first_order_system(grid, cf)
        centre = (n // 2, n // 2)
    imp, exp, _ = system.relation_at(centre)
    courant = (float(C),) if dim == 1 else (float(C), float(D))
    return FrozenStencil(scheme_id=scheme_id, dim=dim, courant=courant, implicit=imp, explicit=exp)


def _first_order_system(grid, cf):
    from .system import StencilSystem

    implicit, explicit = schemes1d._base_dicts(grid)
    C = cf.C[grid.interior]
    sx = schemes1d.sign_with_positive_zero(C)
    schemes1d._scatter(
        implicit, schemes1d._axis_offsets(grid.dim, 0), sx,
        {0: np.abs(C), -1: -np.abs(C)},
    )
    if grid.dim == 2:
        D = cf.D[grid.interior]
        sy = schemes1d.sign_with_positive_zero(D)
        schemes1d._scatter(
            implicit, schemes1d._axis_offsets(grid.dim, 1), sy,
            {0: np.abs(D), -1: -np.abs(D)},
        )
    return StencilSystem(grid, implicit, explicit)


def amplification_factor(stencil: FrozenStencil, theta, theta2=None):
    """g at one or many frequencies; raises on a vanishing implicit symbol."""
    theta = np.asarray(theta, dtype=float)
    if stencil.dim == 2:
        if theta2 is None:
            raise ConfigurationError("2D stencils need both frequencies")
        theta2 = np.asarray(theta2, dtype=float)
    a = np.zeros(np.broadcast(theta, theta2).shape if stencil.dim == 2 else theta.shape, dtype=complex)
    b = np.zeros_like(a)
    for off, coeff in stencil.implicit.items():
        phase = off[0] * theta + (off[1] * theta2 if stencil.dim == 2 else 0.0)
        a = a + coeff * np.exp(1j * phase)
    for off, coeff in stencil.explicit.items():
        phase = off[0] * theta + (off[1] * theta2 if stencil.dim == 2 else 0.0)
        b = b + coeff * np.exp(1j * phase)
    bad = np.abs(a) < 1e-300
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        theta_bad = theta.flat[0] if theta.ndim == 0 else np.broadcast_to(theta, a.shape)[tuple(idx)]
        raise DegenerateSymbolError(
            "implicit symbol vanished", courant=stencil.courant, theta=float(theta_bad)
        )
    return b / a


def max_magnitude(stencil: FrozenStencil, n_theta=256, refine_steps=4, refine_points=33):
    """Maximal |g| over frequencies with iterated window refinement.

    Returns (max_abs_g, argmax_thetas, per_round_maxima).
    """
    lo = (-np.pi, -np.pi)
    hi = (np.pi, np.pi)
    dim = stencil.dim
    best = -np.inf
    arg = (0.0, 0.0)
    maxima = []
    widths = [hi[d] - lo[d] for d in range(dim)]
    centre = [0.0] * dim
    n = n_theta
    for rnd in range(refine_steps + 1):
        axes = [
            np.linspace(centre[d] - widths[d] / 2.0, centre[d] + widths[d] / 2.0, n)
            for d in range(dim)
        ]
        if dim == 1:
            g = amplification_factor(stencil, axes[0])
            mag = np.abs(g)
            k = int(np.argmax(mag))
            cand = (float(axes[0][k]),)
        else:
            T1, T2 = np.meshgrid(axes[0], axes[1], indexing="ij")
            g = amplification_factor(stencil, T1, T2)
            mag = np.abs(g)
            k = np.unravel_index(int(np.argmax(mag)), mag.shape)
            cand = (float(axes[0][k[0]]), float(axes[1][k[1]]))
        m = float(mag.max())
        if m > best:
            best = m
            arg = cand
        maxima.append(best)
        centre = list(arg)
        widths = [w / 8.0 for w in widths]
        n = refine_points
    return best, arg, maxima


def scan_max_magnitude(
    scheme_id,
    courant_values,
    courant_values_2=None,
    w=0.5,
    n_theta=256,
    refine_steps=4,
) -> AmplificationReport:
    """Scan |g| over a set of Courant numbers (the diagonal D-list pairs with
    C-list in 2D when ``courant_values_2`` is None a full product is used)."""
    base, dim = _normalize_scheme(scheme_id)
    cs = np.atleast_1d(np.asarray(courant_values, dtype=float))
    if dim == 2:
        ds = cs if courant_values_2 is None else np.atleast_1d(np.asarray(courant_values_2, dtype=float))
    report = AmplificationReport(
        scheme_id=scheme_id,
        dim=dim,
        courant_range=(float(cs.min()), float(cs.max())),
        freq_resolution=n_theta,
        refine_steps=refine_steps,
    )
    overall_rounds = None
    if dim == 1:
        pairs = [(c, None) for c in cs]
    else:
        pairs = [(c, d) for c in cs for d in ds]
    for c, d in pairs:
        stencil = freeze_scheme(scheme_id, c, d, w=w)
        m, arg, rounds = max_magnitude(stencil, n_theta=n_theta, refine_steps=refine_steps)
        row = (c, 0.0 if d is None else d, m, arg[0], arg[1] if dim == 2 else 0.0)
        report.rows.append(row)
        if m > report.max_abs_g:
            report.max_abs_g = m
            report.argmax = row
            overall_rounds = rounds
    report.round_maxima = overall_rounds or []
    return report


def _polish_pocket(stencil, t1, t2, rounds=3, rad=0.2, n=41):
    """Sharpen a local |g| maximum around (t1, t2) by shrinking grids."""
    best = 0.0
    for _ in range(rounds):
        th1 = np.linspace(t1 - rad, t1 + rad, n)
        th2 = np.linspace(t2 - rad, t2 + rad, n)
        T1, T2 = np.meshgrid(th1, th2, indexing="ij")
        mag = np.abs(amplification_factor(stencil, T1, T2))
        k = np.unravel_index(int(np.argmax(mag)), mag.shape)
        best = float(mag[k])
        t1, t2 = float(th1[k[0]]), float(th2[k[1]])
        rad /= 12.0
    return best, t1, t2


def box_edge_max(scheme_id, s, w=0.5, nd=61, d_lo=0.0, pocket=None):
    """Maximal |g| over the Courant-box edge C = s, 0 <= D <= s (2D).

    The instability pockets of the conditionally stable schemes are tiny and
    extremely shallow near onset, so every D sample gets a brute plus
    polished frequency search, optionally warm-started from a known pocket
    frequency.  Returns (max, D_at_max, theta1, theta2).
    """
    best = (0.0, 0.0, 0.0, 0.0)
    for d in np.linspace(d_lo, s, nd):
        stencil = freeze_scheme(scheme_id, s, d, w=w)
        m, arg, _ = max_magnitude(stencil, n_theta=128, refine_steps=3)
        cand = [(m, arg[0], arg[1])]
        if pocket is not None:
            cand.append(_polish_pocket(stencil, pocket[0], pocket[1]) )
        m, t1, t2 = max(cand)
        m, t1, t2 = _polish_pocket(stencil, t1, t2, rounds=2, rad=0.01)
        if m > best[0]:
            best = (m, float(d), t1, t2)
    # refine the D location around the running best
    m0, d0, t1, t2 = best
    span = s / max(nd - 1, 1)
    for rad in (span, span / 5.0):
        for d in np.linspace(max(d_lo, d0 - rad), min(s, d0 + rad), 9):
            stencil = freeze_scheme(scheme_id, s, d, w=w)
            m, u1, u2 = _polish_pocket(stencil, t1, t2)
            if m > best[0]:
                best = (m, float(d), u1, u2)
        m0, d0, t1, t2 = best
    return best


def instability_threshold(
    scheme_id,
    w=0.5,
    lo=1.0,
    hi=16.0,
    tol=5e-3,
    margin=1e-11,
):
    """Smallest box bound s where some pair |C|, |D| <= s is unstable.

    This makes "stable up to Courant numbers approximately s" precise:
    inside the box [0, s]^2 the magnitude stays at 1 until s crosses the
    threshold, where a shallow off-diagonal pocket (on the box edge C = s)
    first exceeds 1.  Located by bisection with a warm-started pocket
    search; onset excesses are O(1e-10), hence the tiny margin.
    """
    pocket = None

    def edge_max(s):
        nonlocal pocket
        m, d, t1, t2 = box_edge_max(scheme_id, s, w=w, nd=41, pocket=pocket)
        pocket = (t1, t2)
        return m

    if edge_max(lo) > 1.0 + margin:
        raise ConfigurationError(f"lower bracket C={lo} is already unstable")
    if edge_max(hi) <= 1.0 + margin:
        raise ConfigurationError(f"upper bracket C={hi} is still stable")
    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        if edge_max(mid) > 1.0 + margin:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)
