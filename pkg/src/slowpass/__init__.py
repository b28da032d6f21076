"""Discrete slow passage through a saddle-node bifurcation.

Euler-discretized slow-passage dynamics, tipping detection and
classification, numerical verification of the analytic delay bounds,
parameter-plane region and boundary experiments, power-law fitting, and
the bistable cubic switching-delay application.
"""

__version__ = "0.1.0"

from .bistable import (
    ConvergenceUnknown,
    CubicEquilibria,
    DelayResult,
    bistable_delay,
    bistable_landing,
    cubic_equilibria,
    unstable_threshold,
)
from .dynamics import (
    CornerCoordinates,
    MapKind,
    RecordPolicy,
    SlowPassageParams,
    StopRule,
    StopReason,
    Trajectory,
    cubic_upper_root,
    simulate,
    stable_branch,
    step_cubic,
    step_quadratic,
    time_of,
    to_corner,
    unstable_branch,
)
from .fitting import (
    ExponentLawFit,
    FitError,
    PowerLawFit,
    fit_exponent_law,
    fit_power_law,
)
from .sweep import (
    BandSide,
    BoundaryCurve,
    BracketingError,
    CellResult,
    GridBase,
    GridSpec,
    OutOfBudgetError,
    RegionMap,
    RegionSign,
    ScalingPoint,
    Spacing,
    extract_region,
    projected_steps,
    scaling_experiment,
    scaling_experiment_powerlaw,
    sweep_grid,
    trace_boundary,
)
from .theory import (
    LOG2_OVER_6,
    CornerReport,
    EnvelopeCheck,
    TheoryConstants,
    Window,
    constants,
    corner_analysis,
    integrating_factor_integral,
    outer_envelope,
)
from .tipping import (
    SolutionClass,
    TippingDetector,
    TippingReport,
    classify,
    detect_tipping,
    first_tipping,
    max_dt_for_negative_tipping,
    tipping_threshold,
    tips_at_first_step,
    tips_at_third_step,
)

__all__ = [
    "__version__",
    # dynamics
    "MapKind", "StopReason", "SlowPassageParams", "StopRule", "RecordPolicy",
    "Trajectory", "CornerCoordinates", "simulate", "step_quadratic", "step_cubic",
    "time_of", "stable_branch", "unstable_branch", "cubic_upper_root", "to_corner",
    # tipping
    "SolutionClass", "TippingReport", "TippingDetector", "tipping_threshold",
    "detect_tipping", "first_tipping", "classify", "tips_at_first_step",
    "tips_at_third_step", "max_dt_for_negative_tipping",
    # theory
    "LOG2_OVER_6", "TheoryConstants", "Window", "EnvelopeCheck", "CornerReport",
    "constants", "outer_envelope", "corner_analysis", "integrating_factor_integral",
    # sweep
    "Spacing", "GridBase", "GridSpec", "CellResult", "RegionMap", "RegionSign",
    "BandSide", "BoundaryCurve", "BracketingError", "OutOfBudgetError",
    "ScalingPoint", "sweep_grid", "extract_region", "trace_boundary",
    "scaling_experiment", "scaling_experiment_powerlaw", "projected_steps",
    # fitting
    "FitError", "PowerLawFit", "ExponentLawFit", "fit_power_law", "fit_exponent_law",
    # bistable
    "ConvergenceUnknown", "CubicEquilibria", "DelayResult", "cubic_equilibria",
    "unstable_threshold", "bistable_delay", "bistable_landing",
]
