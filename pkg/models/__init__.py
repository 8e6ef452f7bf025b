"""
Models package for trackforge.

This package contains the track model, the vehicle simulator, the reward
family and the trainable driving policies.
"""

from .track import TrackModel, load_track
from .vehicle import SimParams, rollout
from .rewards import RewardCalculator, RewardConfig
from .policy import LinearPolicy, TrainConfig, train_cem

__version__ = "0.2.0"

__all__ = [
    "TrackModel",
    "load_track",
    "SimParams",
    "rollout",
    "RewardCalculator",
    "RewardConfig",
    "LinearPolicy",
    "TrainConfig",
    "train_cem",
]
