"""
Linear driving policies and their cross-entropy method trainer.
"""

from .linear import CheckpointError, LinearPolicy, featurize, load_checkpoint, save_checkpoint
from .evaluation import evaluate_policy
from .cem import TrainConfig, TrainResult, train_cem

__all__ = [
    "CheckpointError",
    "LinearPolicy",
    "featurize",
    "load_checkpoint",
    "save_checkpoint",
    "evaluate_policy",
    "TrainConfig",
    "TrainResult",
    "train_cem",
]
