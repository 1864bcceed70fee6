"""Brownian motions on the half line and the unit interval under general
(Wentzell) boundary conditions: exact path construction, closed-form
transition/resolvent kernels, and a statistical harness certifying that
the two agree.
"""

from .engine import (
    AugmentedPath,
    SamplePath,
    TimeGrid,
    build_process,
    hitting_time,
    local_time_downcrossing,
    pchaf_kill,
    read_path_csv,
    reflect_with_local_time,
    sample_bm,
    sticky_time_change,
    write_path_csv,
)
from .errors import (
    AllZero,
    BadEps,
    ConfigError,
    FellerBMError,
    GridTooShort,
    MissingRequired,
    NegativeStart,
    NonPositiveLambda,
    NonPositiveTime,
    NotAdditiveFunctional,
    PureDirichlet,
    SingularSystem,
    StartOutOfRange,
    TypeMismatch,
    UnknownKey,
)
from .interval import (
    PiecingRecord,
    SegmentKind,
    build_interval_path,
    stopped_at_boundary,
)
from .kernels import (
    BoundaryMeasure,
    LaplaceFactors,
    K_ab_apply,
    g_family,
    interval_dirichlet_resolvent,
    interval_hitting_lt,
    interval_resolvent,
    laplace_factors,
    resolvent_measure,
    transition_measure,
)
from .laws import (
    ScalarLaw,
    joint_refl_lt_density,
    k_r_law,
    kill_before_hit_prob,
    local_time_law,
    ls_alpha_potential,
    sticky_exit_mean,
    v_exit,
    zeta_lt,
)
from .model import (
    BoundaryModel,
    Mode,
    Side,
    WentzellTriple,
    normalize_wentzell,
    wentzell_residual,
)
from .validation import (
    CheckResult,
    MCEstimate,
    SuiteConfig,
    ValidationReport,
    boundary_residual_numeric,
    empirical_measure_distance,
    first_passage_check,
    mc_resolvent,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedPath",
    "SamplePath",
    "TimeGrid",
    "build_process",
    "hitting_time",
    "local_time_downcrossing",
    "pchaf_kill",
    "read_path_csv",
    "reflect_with_local_time",
    "sample_bm",
    "sticky_time_change",
    "write_path_csv",
    "AllZero",
    "BadEps",
    "ConfigError",
    "FellerBMError",
    "GridTooShort",
    "MissingRequired",
    "NegativeStart",
    "NonPositiveLambda",
    "NonPositiveTime",
    "NotAdditiveFunctional",
    "PureDirichlet",
    "SingularSystem",
    "StartOutOfRange",
    "TypeMismatch",
    "UnknownKey",
    "PiecingRecord",
    "SegmentKind",
    "build_interval_path",
    "stopped_at_boundary",
    "BoundaryMeasure",
    "LaplaceFactors",
    "K_ab_apply",
    "g_family",
    "interval_dirichlet_resolvent",
    "interval_hitting_lt",
    "interval_resolvent",
    "laplace_factors",
    "resolvent_measure",
    "transition_measure",
    "ScalarLaw",
    "joint_refl_lt_density",
    "k_r_law",
    "kill_before_hit_prob",
    "local_time_law",
    "ls_alpha_potential",
    "sticky_exit_mean",
    "v_exit",
    "zeta_lt",
    "BoundaryModel",
    "Mode",
    "Side",
    "WentzellTriple",
    "normalize_wentzell",
    "wentzell_residual",
    "CheckResult",
    "MCEstimate",
    "SuiteConfig",
    "ValidationReport",
    "boundary_residual_numeric",
    "empirical_measure_distance",
    "first_passage_check",
    "mc_resolvent",
    "run_suite",
    "__version__",
]
