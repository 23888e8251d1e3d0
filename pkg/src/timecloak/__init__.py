"""timecloak: a numerical laboratory for temporal cloaking by a piecewise
change of the time variable.

The package solves the wave equation on a box, applies the time-shift
construction that excises a spacetime void, and verifies in several
independent ways that boundary measurements cannot detect the void.
"""

from .errors import TimecloakError
from .kernels import BACKEND
from .profile import CloakProfile, RegionLabel
from .symbol import (
    FeasibilityReport,
    Metric,
    characteristic_roots,
    hyperbolicity_margin,
    max_admissible_c0,
    principal_symbol,
    transform_metric,
)
from .wavesolver import (
    BoundarySignal,
    BoundaryTrace,
    Grid,
    SpacetimeField,
    boundary_trace,
    dalembert_oracle_1d,
    solve_physical,
    suggest_dt,
)
from .transformed import (
    CloakedField,
    cross_agreement,
    glue_check,
    map_solution,
    residual_field,
    residual_transformed,
    slice_initial_data,
    solve_transformed_above,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    PhysicalParams,
    convergence_study,
    event_invariance_demo,
    run_cloak_experiment,
)

__version__ = "0.1.0"
