"""Adaptive optimizers with layerwise stepsize telemetry."""

from ._core import (
    ConfigError,
    Dataset,
    HyperParams,
    IdxError,
    LayeredVector,
    LayerStats,
    MlpObjective,
    Objective,
    Optimizer,
    OptimizerState,
    QuadraticObjective,
    Rng,
    RosenbrockObjective,
    Schedule,
    StepStats,
    __version__,
    finite_diff_grad,
    load_idx,
    lr_at,
    make_optimizer,
    make_params,
    optimizer_ids,
    project_pair,
    quadratic_objective,
    run_config_file,
    run_json,
    split_train_val,
    stepsize_stats,
    synth_gaussian_classes,
)

__all__ = [
    "ConfigError",
    "Dataset",
    "HyperParams",
    "IdxError",
    "LayeredVector",
    "LayerStats",
    "MlpObjective",
    "Objective",
    "Optimizer",
    "OptimizerState",
    "QuadraticObjective",
    "Rng",
    "RosenbrockObjective",
    "Schedule",
    "StepStats",
    "__version__",
    "finite_diff_grad",
    "load_idx",
    "lr_at",
    "make_optimizer",
    "make_params",
    "optimizer_ids",
    "project_pair",
    "quadratic_objective",
    "run_config_file",
    "run_json",
    "split_train_val",
    "stepsize_stats",
    "synth_gaussian_classes",
]
