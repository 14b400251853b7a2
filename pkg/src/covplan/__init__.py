"""Coverage path planning over occupancy grids.

Boustrophedon cellular decomposition, serpentine rastering with
configurable sample spacing, thin-obstacle preprocessing, triangulated
reconstruction of the sampled distribution, and a seeded Monte-Carlo
harness quantifying the accuracy-vs-effort tradeoff of any plan.
"""

from .decompose import Cell, CellSet, FreeInterval, cell_corners, decompose, slice_free_intervals
from .envgen import (
    EnvGenParams,
    EnvironmentBundle,
    gaussian_smooth,
    generate_environment,
    heterogeneity_scale,
    rescale_unit,
    seed_field,
    solve_density_sigma,
)
from .errors import (
    BoundsError,
    CovplanError,
    DataFormatError,
    EmptyPlanError,
    ParameterError,
)
from .estimate import EstimatedField, SampleSet, Triangulation, interpolate, triangulate
from .grid import (
    Coord,
    LabelGrid,
    OccupancyGrid,
    ScalarField,
    connected_components,
    neighbors,
    path_cost,
    shortest_path,
)
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .metrics import MetricsRecord, evaluate, hotspot_miss_rate, rmse
from .montecarlo import (
    AggregateStats,
    EnvArm,
    SweepConfig,
    SweepResult,
    TrialConfig,
    aggregate,
    run_sweep,
    run_trial,
)
from .planner import Plan, PlanConfig, next_cell, path_length, plan, raster_cell
from .preprocess import (
    CorrectionResult,
    PreprocessResult,
    correct_path,
    obstacle_width,
    remove_thin_obstacles,
)

__version__ = "0.1.0"
