"""
Kinematic bicycle simulator and episode rollouts.
"""

from .dynamics import Action, SimParams, VehicleState, step
from .rollout import EpisodeTrace, TerminationReason, rollout

__all__ = [
    "Action",
    "SimParams",
    "VehicleState",
    "step",
    "EpisodeTrace",
    "TerminationReason",
    "rollout",
]
