"""Personalized mood prediction on a 64-cell affect grid from sparse check-ins."""

from .config import EngineConfig
from .factors import (
    CheckIn,
    EnvSnapshot,
    FactorDescriptor,
    FactorRegistry,
    default_registry,
    validate_snapshot,
)
from .grid import EmotionPoint, GridIndex, grid_center, nearest_cell, within_tolerance
from .personalization import PersonalWeights, UserProfile, process_feedback
from .predictor import Prediction, predict
from .similarity import SimilarityTable, retrieve
from .store import Store

__version__ = "0.1.0"

__all__ = [
    "CheckIn",
    "EmotionPoint",
    "EngineConfig",
    "EnvSnapshot",
    "FactorDescriptor",
    "FactorRegistry",
    "GridIndex",
    "PersonalWeights",
    "Prediction",
    "SimilarityTable",
    "Store",
    "UserProfile",
    "default_registry",
    "grid_center",
    "nearest_cell",
    "predict",
    "process_feedback",
    "retrieve",
    "validate_snapshot",
    "within_tolerance",
]
