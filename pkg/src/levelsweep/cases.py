"""Benchmark catalog: exact solutions, domains, ladders and defaults.

Every case provides a vectorized exact solution phi(x[, y], t) used for the
initial condition, for ghost and inflow values, and for the error norm.
Resolution ladders halve h and tau together, so each ladder keeps a fixed
maximal Courant number; ``anchor`` is the extra coarser level that seeds the
first convergence-order entry of a ladder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .velocity import VelocityModel


@dataclass(frozen=True)
class Ladder:
    """Resolution ladder: (I, N) pairs plus the optional coarse anchor."""

    entries: tuple[tuple[int, int], ...]
    anchor: tuple[int, int] | None = None

    def __post_init__(self):
        prev = self.anchor
        for I, N in self.entries:
            if prev is not None and (I != 2 * prev[0] or N != 2 * prev[1]):
                raise ConfigurationError(
                    f"ladder entry ({I},{N}) does not halve steps after {prev}"
                )
            prev = (I, N)


@dataclass
class ExperimentCase:
    """A complete benchmark definition."""

    id: str
    dim: int
    bounds: tuple
    t_final: float
    exact: callable
    velocity: VelocityModel
    ladders: dict[str, Ladder]
    default_ladder: str = "default"
    default_sweeps: int = 8
    default_scheme: str = "third"
    second_order_w: float = 0.5
    ghost_width: int = 2
    boundary_rule: str = "exact"
    notes: str = ""

    def ladder(self, name=None) -> Ladder:
        name = name or self.default_ladder
        try:
            return self.ladders[name]
        except KeyError:
            raise ConfigurationError(
                f"case {self.id!r} has no ladder {name!r}; "
                f"available: {sorted(self.ladders)}"
            ) from None

    def initial(self, *coords):
        return self.exact(*coords, 0.0)


# -- 1D cases ----------------------------------------------------------------

def _smooth1d_exact(x, t):
    # characteristics of u = sin(x): tan(x0/2) = tan(x/2) exp(-t)
    return np.sin(2.0 * np.arctan(np.tan(0.5 * x) * np.exp(-t)))


def _nonsmooth1d_profile(xi):
    """Piecewise initial profile on [-1, 1), extended periodically."""
    c = np.sqrt(3.0) / 2.0 + 4.5 + 2.0 * np.pi / 3.0
    xi = np.asarray(xi, dtype=float)
    base = -c * (xi + 1.0)
    parts = [
        2.0 * np.cos(1.5 * np.pi * xi**2) - np.sqrt(3.0),
        1.5 + 3.0 * np.cos(2.0 * np.pi * xi),
        7.5 - 3.0 * np.cos(2.0 * np.pi * xi),
        6.0 * np.pi * xi * (xi - 1.0) + (28.0 + 4.0 * np.pi + np.cos(3.0 * np.pi * xi)) / 3.0,
    ]
    conds = [
        xi < -1.0 / 3.0,
        (xi >= -1.0 / 3.0) & (xi < 0.0),
        (xi >= 0.0) & (xi < 1.0 / 3.0),
        xi >= 1.0 / 3.0,
    ]
    return base + np.select(conds, parts)


def _nonsmooth1d_exact(x, t):
    # initial profile shifted by 0.5, translated with unit speed, period 2
    xi = np.mod(x - 0.5 - t + 1.0, 2.0) - 1.0
    return _nonsmooth1d_profile(xi)


# -- 2D helpers ----------------------------------------------------------------

def _rotated(x, y, t):
    """Frame rotating with u = (-y, x), shifted so the pivot sits at -0.25."""
    ct, st = np.cos(t), np.sin(t)
    return x * ct + y * st + 0.25, y * ct - x * st


def _rotation_velocity(delta):
    return VelocityModel(external=lambda x, y: (-y, x), delta=delta)


def _quartic_exact(x, y, t):
    xt, yt = _rotated(x, y, t)
    return xt**4 + yt**4


def _square_shrink_exact(delta):
    def exact(x, y, t):
        xt, yt = _rotated(x, y, t)
        return np.maximum(np.abs(xt), np.abs(yt)) - delta * t
    return exact


def _square_expand_exact(delta):
    def exact(x, y, t):
        xt, yt = _rotated(x, y, t)
        dt = delta * t
        axt, ayt = np.abs(xt), np.abs(yt)
        face = np.maximum(axt, ayt) - dt
        # corner wedges: circular arcs centred on the diagonal bisectors
        rad = np.sqrt(np.maximum(0.0, 2.0 * dt**2 - (axt - ayt) ** 2))
        d = 0.5 * (axt + ayt - rad)
        corner = np.sqrt((axt - d) ** 2 + (ayt - d) ** 2) - dt + d
        in_core = xt**2 + yt**2 <= dt**2
        in_face = np.abs(axt - ayt) >= dt
        out = np.where(in_face, face, corner)
        return np.where(in_core, 0.0, out)
    return exact


def _circle_exact(delta):
    def exact(x, y, t):
        xt, yt = _rotated(x, y, t)
        return np.maximum(0.0, np.sqrt(xt**2 + yt**2) - delta * t)
    return exact


def _exp_speed(x, y):
    return np.exp(2.0 * (y - x))


def _exp_initial(x, y):
    return np.sqrt((x + 1.0) ** 2 + (y + 1.0) ** 2)


def _exp_inflow_exact(x, y, t):
    u = _exp_speed(x, y)
    return _exp_initial(x - t * u, y - t * u)


def _exp_fixed_exact(x, y, t):
    u = _exp_speed(x, y)
    x0, y0 = x - t * u, y - t * u
    upper = y >= x  # characteristics trace back to the left edge here
    from_left = _exp_initial(-1.0, y - x - 1.0)
    from_bottom = _exp_initial(x - y - 1.0, -1.0)
    inside = np.where(upper, x0 >= -1.0, y0 >= -1.0)
    frozen = np.where(upper, from_left, from_bottom)
    return np.where(inside, _exp_initial(x0, y0), frozen)


DEFAULT_SEVEN_CIRCLES = tuple(
    (0.25 * np.cos(2.0 * np.pi * k / 7.0), 0.25 * np.sin(2.0 * np.pi * k / 7.0), 0.04)
    for k in range(7)
)


def seven_circles_exact(circles=DEFAULT_SEVEN_CIRCLES):
    """Distance to a family of circles, rotated rigidly about the origin."""
    circles = tuple(circles)

    def exact(x, y, t):
        ct, st = np.cos(t), np.sin(t)
        xt, yt = x * ct + y * st, y * ct - x * st
        dist = None
        for cx, cy, r in circles:
            d = np.abs(np.sqrt((xt - cx) ** 2 + (yt - cy) ** 2) - r)
            dist = d if dist is None else np.minimum(dist, d)
        return dist

    return exact


def _case_map():
    dm = {}

    def add(case):
        dm[case.id] = case

    add(
        ExperimentCase(
            id="ex1d-smooth",
            dim=1,
            bounds=((-np.pi / 2.0, 7.0 * np.pi / 2.0),),
            t_final=2.0,
            exact=_smooth1d_exact,
            velocity=VelocityModel(external=np.sin),
            ladders={
                "default": Ladder(
                    entries=((400, 2), (800, 4), (1600, 8), (3200, 16)),
                    anchor=(200, 1),
                )
            },
            default_sweeps=6,
            notes="velocity sin(x) changes sign four times in the interval",
        )
    )
    add(
        ExperimentCase(
            id="ex1d-nonsmooth",
            dim=1,
            bounds=((-1.0, 1.0),),
            t_final=2.0,
            exact=_nonsmooth1d_exact,
            velocity=VelocityModel(external=lambda x: np.ones_like(np.asarray(x, dtype=float))),
            ladders={
                "default": Ladder(
                    entries=((160, 32), (320, 64), (640, 128), (1280, 256)),
                    anchor=(80, 16),
                )
            },
            default_sweeps=2,
            default_scheme="hr",
            notes="piecewise profile with gradient jumps, Courant number 5",
        )
    )
    add(
        ExperimentCase(
            id="ex2d-quartic",
            dim=2,
            bounds=((-1.0, 1.0), (-1.0, 1.0)),
            t_final=np.pi,
            exact=_quartic_exact,
            velocity=_rotation_velocity(0.0),
            ladders={
                "default": Ladder(entries=((80, 8), (160, 16), (320, 32)), anchor=(40, 4))
            },
        )
    )
    delta = 0.1 / np.pi
    add(
        ExperimentCase(
            id="ex2d-square-shrink",
            dim=2,
            bounds=((-0.5, 0.5), (-0.5, 0.5)),
            t_final=np.pi,
            exact=_square_shrink_exact(-delta),
            velocity=_rotation_velocity(-delta),
            ladders={
                "default": Ladder(entries=((64, 8), (128, 16), (256, 32)), anchor=(32, 4))
            },
            ghost_width=3,
        )
    )
    add(
        ExperimentCase(
            id="ex2d-square-expand",
            dim=2,
            bounds=((-0.5, 0.5), (-0.5, 0.5)),
            t_final=np.pi,
            exact=_square_expand_exact(delta),
            velocity=_rotation_velocity(delta),
            ladders={
                "default": Ladder(entries=((64, 8), (128, 16), (256, 32)), anchor=(32, 4))
            },
            ghost_width=3,
        )
    )
    circle_ladders = {
        "c27": Ladder(entries=((64, 4), (128, 8), (256, 16)), anchor=(32, 2)),
        "c13.5": Ladder(entries=((64, 8), (128, 16), (256, 32)), anchor=(32, 4)),
    }
    add(
        ExperimentCase(
            id="ex2d-circle-shrink",
            dim=2,
            bounds=((-0.5, 0.5), (-0.5, 0.5)),
            t_final=np.pi,
            exact=_circle_exact(-delta),
            velocity=_rotation_velocity(-delta),
            ladders=dict(circle_ladders, default=circle_ladders["c27"]),
            ghost_width=3,
        )
    )
    add(
        ExperimentCase(
            id="ex2d-circle-expand",
            dim=2,
            bounds=((-0.5, 0.5), (-0.5, 0.5)),
            t_final=np.pi,
            exact=_circle_exact(delta),
            velocity=_rotation_velocity(delta),
            ladders=dict(circle_ladders, default=circle_ladders["c27"]),
            ghost_width=3,
        )
    )
    exp_velocity = VelocityModel(external=lambda x, y: (_exp_speed(x, y), _exp_speed(x, y)))
    exp_ladders = {
        "c10.9": Ladder(entries=((80, 80), (160, 160), (320, 320)), anchor=(40, 40)),
        "c109": Ladder(entries=((80, 8), (160, 16), (320, 32)), anchor=(40, 4)),
        "c436": Ladder(entries=((80, 2), (160, 4), (320, 8)), anchor=(40, 1)),
    }
    add(
        ExperimentCase(
            id="ex2d-exp-inflow",
            dim=2,
            bounds=((-1.0, 1.0), (-1.0, 1.0)),
            t_final=0.4,
            exact=_exp_inflow_exact,
            velocity=exp_velocity,
            ladders=dict(exp_ladders, default=exp_ladders["c436"]),
        )
    )
    add(
        ExperimentCase(
            id="ex2d-exp-fixed",
            dim=2,
            bounds=((-1.0, 1.0), (-1.0, 1.0)),
            t_final=0.4,
            exact=_exp_fixed_exact,
            velocity=exp_velocity,
            ladders={
                "c10.9": exp_ladders["c10.9"],
                "c109": exp_ladders["c109"],
                "default": exp_ladders["c109"],
            },
            notes="stationary profile; left/bottom edges keep their initial values",
        )
    )
    add(
        ExperimentCase(
            id="ex2d-seven-circles",
            dim=2,
            bounds=((-0.5, 0.5), (-0.5, 0.5)),
            t_final=np.pi / 12.0,
            exact=seven_circles_exact(),
            velocity=_rotation_velocity(0.0),
            ladders={"default": Ladder(entries=((248, 8),))},
            notes=(
                "circle geometry is a shipped default (ring of seven radius-0.04 "
                "circles); override via seven_circles_exact"
            ),
        )
    )
    return dm


_CASES = _case_map()


def exact_solution_catalog():
    """All shipped benchmark cases, in a stable order."""
    return [_CASES[k] for k in sorted(_CASES)]


def get_case(case_id: str) -> ExperimentCase:
    try:
        return _CASES[case_id]
    except KeyError:
        raise ConfigurationError(
            f"unknown case {case_id!r}; known: {', '.join(sorted(_CASES))}"
        ) from None
