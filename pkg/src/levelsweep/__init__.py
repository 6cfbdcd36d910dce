"""Semi-implicit level-set advection on structured grids.

Compact implicit upwind schemes (parametric second order, high resolution,
third order) for advection by an external velocity plus a speed in the
normal direction, solved per time step with the fast sweeping method, with a
von Neumann amplification scanner and a benchmark harness on top.
"""

from .cases import ExperimentCase, Ladder, exact_solution_catalog, get_case, seven_circles_exact
from .errors import (
    AssemblyError,
    ConfigurationError,
    DegenerateSymbolError,
    DivergenceError,
    LevelsweepError,
    OracleError,
    SolverError,
)
from .experiments import ErrorRecord, eoc_table, run_case, run_ladder, write_records_csv
from .grid import (
    CourantField,
    Field,
    Grid,
    GridSpec,
    build_grid,
    courant_numbers,
    inflow_mask,
    inject_boundary,
    read_snapshot,
    write_snapshot,
)
from .schemes1d import (
    LimiterState,
    SchemeParams,
    assemble_high_resolution,
    assemble_second_order,
    assemble_third_order,
    backward_differences,
    limiter_pipeline,
    predict_step,
    preferred_weight,
)
from .schemes2d import (
    assemble_high_resolution_2d,
    assemble_second_order_2d,
    assemble_third_order_2d,
    limiter_pipeline_2d,
)
from .solver import (
    dense_oracle_solve,
    direct_solve,
    residual_norm,
    sweep_solve,
    sweep_solve_reference,
)
from .stability import (
    AmplificationReport,
    FrozenStencil,
    amplification_factor,
    box_edge_max,
    freeze_scheme,
    instability_threshold,
    max_magnitude,
    scan_max_magnitude,
)
from .system import StencilSystem
from .velocity import VelocityModel, assemble_velocity, upwind_gradient, weno_one_sided

__version__ = "0.1.0"
