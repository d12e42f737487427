"""Link-level simulator and constrained beamforming optimizer for BD-RIS."""

__version__ = "0.1.0"

from .channel import (
    FadingConfig,
    GeometryConfig,
    LinkClass,
    ScenarioChannels,
    path_loss_linear,
    sample_scenario,
)
from .metrics import (
    LinkBudget,
    cellular_interference,
    effective_channel,
    sinr_v2v,
    spectral_efficiency,
    v2v_spectral_efficiency,
)
from .optimizer import (
    OptimizeResult,
    OptimizerSettings,
    alternating_optimize,
    brute_force_oracle,
    closed_form_align,
    optimal_power,
    projected_gradient_ascent,
    wirtinger_gradient,
)
from .scattering import (
    Architecture,
    ConstraintReport,
    Mode,
    RankDeficientBlockError,
    RisConfig,
    ScatteringMatrix,
    hardware_complexity,
    nonzero_count,
    project_feasible,
    random_feasible,
    tangent_project,
    validate,
)
from .scenario import (
    AggregateRow,
    SweepConfig,
    SweepRecord,
    aggregate,
    run_sweep,
    run_trial,
    trial_seed,
)

__all__ = [
    "__version__",
    "Architecture",
    "Mode",
    "RisConfig",
    "ScatteringMatrix",
    "ConstraintReport",
    "RankDeficientBlockError",
    "validate",
    "project_feasible",
    "random_feasible",
    "tangent_project",
    "hardware_complexity",
    "nonzero_count",
    "GeometryConfig",
    "FadingConfig",
    "LinkClass",
    "ScenarioChannels",
    "path_loss_linear",
    "sample_scenario",
    "LinkBudget",
    "effective_channel",
    "sinr_v2v",
    "cellular_interference",
    "spectral_efficiency",
    "v2v_spectral_efficiency",
    "OptimizerSettings",
    "OptimizeResult",
    "optimal_power",
    "closed_form_align",
    "wirtinger_gradient",
    "projected_gradient_ascent",
    "alternating_optimize",
    "brute_force_oracle",
    "SweepConfig",
    "SweepRecord",
    "AggregateRow",
    "run_trial",
    "run_sweep",
    "aggregate",
    "trial_seed",
]
