"""
Policy evaluation over seeded episodes.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from models.rewards import RewardConfig
from models.track.geometry import TrackModel
from models.vehicle.dynamics import SimParams
from models.vehicle.rollout import DrivingPolicy, EpisodeTrace, rollout
from models.workers import ordered_map


@dataclass(frozen=True)
class EpisodeMetrics:
    seed: int
    total_return: float
    completed: bool
    steps: int
    termination: str
    smoothness: float
    mean_speed: float
    lap_time: Optional[float]


@dataclass
class EvaluationResult:
    mean_return: float
    episodes: List[EpisodeMetrics]
    traces: List[EpisodeTrace] = field(default_factory=list, repr=False)

    @property
    def completion_rate(self) -> float:
        return float(np.mean([e.completed for e in self.episodes])) if self.episodes else 0.0


def smoothness_index(trace: EpisodeTrace) -> float:
    """Mean |steering change| per step in degrees; 0 for an empty trace."""
    if not len(trace):
        return 0.0
    return float(np.mean(np.abs(trace.column("dsteer"))))


def episode_metrics(trace: EpisodeTrace, dt: float) -> EpisodeMetrics:
    steps = len(trace)
    return EpisodeMetrics(
        seed=trace.seed,
        total_return=trace.total_return,
        completed=trace.completed,
        steps=steps,
        termination=trace.termination.value,
        smoothness=smoothness_index(trace),
        mean_speed=float(np.mean(trace.column("speed"))) if steps else 0.0,
        lap_time=steps * dt if trace.completed else None,
    )


def evaluate_policy(policy: DrivingPolicy,
                    track: TrackModel,
                    reward_config: RewardConfig,
                    params: SimParams,
                    seeds: Sequence[int],
                    keep_traces: bool = False,
                    workers: Optional[int] = None) -> EvaluationResult:
    """
    Mean episode return over the given seeds plus per-episode metrics.

    Args:
        policy: Policy to drive with
        track: Track to drive on
        reward_config: Reward parameterization
        params: Simulator parameters
        seeds: Episode seeds, at least one
        keep_traces: Keep the full traces on the result
        workers: Worker threads (None reads TRACKFORGE_THREADS)

    Returns:
        EvaluationResult
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("evaluate_policy needs at least one seed")

    traces = ordered_map(lambda seed: rollout(policy, track, reward_config, params, seed), seeds, workers)
    episodes = [episode_metrics(trace, params.dt) for trace in traces]
    mean_return = float(np.mean([e.total_return for e in episodes]))
    return EvaluationResult(mean_return, episodes, traces if keep_traces else [])
