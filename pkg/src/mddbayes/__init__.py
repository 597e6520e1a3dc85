"""Multimodal Bayesian network for joint depression and symptom prediction."""

__version__ = "0.1.0"

from .dag import SymptomDag, empty_dag, validate_dag
from .density import log_factor_condition, log_factor_measure, log_factor_symptom, log_joint, log_prior, logistic
from .enumeration import PredictionResult, enumerate_posterior, predict
from .fit import PosteriorDraws, fit
from .lingam import LingamConfig, causal_order, discover_symptom_dag, prune_edges
from .metrics import roc_auc
from .nuts import McmcConfig, nuts_sample
from .types import Evidence, ModelParams, Observation, ParticipantRecord

__all__ = [
    "Evidence",
    "LingamConfig",
    "McmcConfig",
    "ModelParams",
    "Observation",
    "ParticipantRecord",
    "PosteriorDraws",
    "PredictionResult",
    "SymptomDag",
    "causal_order",
    "discover_symptom_dag",
    "empty_dag",
    "enumerate_posterior",
    "fit",
    "log_factor_condition",
    "log_factor_measure",
    "log_factor_symptom",
    "log_joint",
    "log_prior",
    "logistic",
    "nuts_sample",
    "predict",
    "prune_edges",
    "roc_auc",
    "validate_dag",
]
