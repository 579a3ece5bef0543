"""Calibration and plausibility learning: envelopes, a genetic search for
parameter ensembles, and an actively trained plausibility classifier."""

from .active import AlConfig, AlResult, PoolExhausted, TrainParams, active_learn
from .criterion import (
    Envelope,
    GridMismatch,
    PlausibilityCriterion,
    evaluate_candidate,
    fitness,
    is_plausible,
    load_envelope_csv,
    save_envelope_csv,
)
from .experiment import (
    AlExperiment,
    CalibrationProblem,
    ConfigError,
    GaExperiment,
    calibration_problem,
    load_al_experiment,
    load_ga_experiment,
    load_pool_csv,
    run_al_experiment,
    run_ga_experiment,
)
from .ga import GaConfig, GaResult, NoPlausibleFound, ga_calibrate
from .network import (
    Classifier,
    GradCheck,
    SingleClassData,
    TrainResult,
    accuracy,
    gradient_check,
    load_weights,
    loss_and_grads,
    save_weights,
    train_classifier,
)

__all__ = [
    "AlConfig",
    "AlExperiment",
    "AlResult",
    "CalibrationProblem",
    "Classifier",
    "ConfigError",
    "Envelope",
    "GaConfig",
    "GaExperiment",
    "GaResult",
    "GradCheck",
    "GridMismatch",
    "NoPlausibleFound",
    "PlausibilityCriterion",
    "PoolExhausted",
    "SingleClassData",
    "TrainParams",
    "TrainResult",
    "accuracy",
    "active_learn",
    "calibration_problem",
    "evaluate_candidate",
    "fitness",
    "ga_calibrate",
    "gradient_check",
    "is_plausible",
    "load_al_experiment",
    "load_envelope_csv",
    "load_ga_experiment",
    "load_pool_csv",
    "load_weights",
    "loss_and_grads",
    "run_al_experiment",
    "run_ga_experiment",
    "save_envelope_csv",
    "save_weights",
    "train_classifier",
]
