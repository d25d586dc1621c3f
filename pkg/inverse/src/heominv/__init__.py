"""heominv: learn excitonic-chain Hamiltonian parameters from dynamics.

Reads the binary dataset directories produced by the simulation side
(manifest.json + labels.f64 + features.f64), trains a convolutional
regression network on the stored trajectories, and reports MSE / R^2 on
held-out splits, k-fold cross-validation, window-truncation studies and
the weak-coupling error breakdown.
"""

from .data import LoadedDataset, load_dataset, steps_for_window_fs
from .errors import ConfigurationError, DegenerateScalingError
from .metrics import EvalReport, evaluate_predictions, mean_squared_error, r2_percent
from .model import ModelSpec, build_model, spec_for_dataset
from .preprocess import PreprocessState
from .training import (
    Splits,
    StopOnConsecutiveIncreases,
    TrainConfig,
    evaluate,
    make_splits,
    predict,
    train,
)
from .experiments import (
    PipelineResult,
    kfold_cv,
    overdamped_analysis,
    run_experiment,
    run_pipeline,
    window_truncation_study,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DegenerateScalingError",
    "EvalReport",
    "LoadedDataset",
    "ModelSpec",
    "PipelineResult",
    "PreprocessState",
    "Splits",
    "StopOnConsecutiveIncreases",
    "TrainConfig",
    "build_model",
    "evaluate",
    "evaluate_predictions",
    "kfold_cv",
    "load_dataset",
    "make_splits",
    "mean_squared_error",
    "overdamped_analysis",
    "predict",
    "r2_percent",
    "run_experiment",
    "run_pipeline",
    "spec_for_dataset",
    "steps_for_window_fs",
    "train",
    "window_truncation_study",
]
