"""
Cross-Entropy Method Trainer

Derivative-free search over the linear policy weights. Each iteration samples
a population from a diagonal Gaussian, scores every candidate on the same
seeded episodes, refits the mean to the elite candidates and shrinks the noise
by a fixed factor down to a floor.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.policy.evaluation import evaluate_policy
from models.policy.linear import DEFAULT_LOOKAHEADS, ActionBounds, LinearPolicy, feature_dimension
from models.rewards import RewardConfig
from models.track.geometry import TrackModel
from models.vehicle.dynamics import SimParams
from models.workers import ordered_map

logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-3
SEED_SPACE = 2 ** 31 - 1


class TrainConfig(BaseModel):
    """Budget and search settings for the cross-entropy method."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    population_size: int = Field(32, ge=4, description="Candidates sampled per iteration.")
    elite_fraction: float = Field(0.25, gt=0, le=1, description="Share of the population refit as the new mean.")
    noise_std_init: float = Field(1.0, gt=0, description="Initial sampling standard deviation per weight.")
    noise_decay: float = Field(0.95, gt=0, le=1, description="Multiplicative noise shrink per iteration.")
    iterations: int = Field(40, ge=1, description="Number of CEM iterations.")
    episodes_per_candidate: int = Field(2, ge=1, description="Seeded episodes averaged per candidate.")
    master_seed: int = Field(0, description="Seed all sampling and episode seeds derive from.")
    lookaheads: Tuple[float, ...] = Field(DEFAULT_LOOKAHEADS, min_length=1, description="Curvature lookahead distances in meters.")

    @model_validator(mode="after")
    def _elite_count(self) -> "TrainConfig":
        if self.n_elite < 1:
            raise ValueError("elite_fraction * population_size must keep at least one elite")
        return self

    @property
    def n_elite(self) -> int:
        return max(1, math.floor(self.elite_fraction * self.population_size))


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    mean_return: float
    elite_mean_return: float
    best_return: float
    noise_std: float


@dataclass
class TrainResult:
    best_policy: LinearPolicy
    best_return: float
    history: List[IterationStats] = field(default_factory=list)
    total_episodes: int = 0
    final_mean: Optional[np.ndarray] = None

    def stats_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(h.iteration, h.mean_return, h.elite_mean_return, h.best_return, h.noise_std) for h in self.history],
            columns=["iteration", "mean_return", "elite_mean_return", "best_so_far", "noise_std"],
        )


def train_cem(track: TrackModel,
              reward_config: RewardConfig,
              params: SimParams,
              config: TrainConfig,
              objective: Callable[[np.ndarray], float] = None,
              workers: Optional[int] = None) -> TrainResult:
    """
    Train a linear policy with the cross-entropy method.

    Args:
        track: Track used for every rollout
        reward_config: Reward variant the returns are computed with
        params: Simulator parameters
        config: Population, elite fraction, noise schedule and budget
        objective: Optional replacement for the rollout return, called with the
            flat weight vector (used to check the optimizer on known problems)
        workers: Worker threads for candidate evaluation

    Returns:
        TrainResult: Best policy seen, per-iteration statistics and episode count
    """
    bounds = ActionBounds.from_params(params)
    dim = 2 * feature_dimension(config.lookaheads)
    rng = np.random.default_rng(config.master_seed)

    mean = np.zeros(dim)
    std = max(config.noise_std_init, NOISE_FLOOR)
    best_return = -math.inf
    best_weights = mean.copy()
    history: List[IterationStats] = []
    total_episodes = 0

    for iteration in range(config.iterations):
        candidates = mean + std * rng.standard_normal((config.population_size, dim))
        # common random numbers: every candidate sees the same episode seeds
        seeds = rng.integers(0, SEED_SPACE, size=config.episodes_per_candidate).tolist()

        if objective is not None:
            returns = np.array([float(objective(c)) for c in candidates])
        else:
            def score(weights: np.ndarray) -> float:
                policy = LinearPolicy.from_flat(weights, config.lookaheads, bounds)
                return evaluate_policy(policy, track, reward_config, params, seeds, workers=1).mean_return

            returns = np.array(ordered_map(score, candidates, workers))
        total_episodes += config.population_size * config.episodes_per_candidate

        order = np.argsort(-returns, kind="stable")
        elite = order[:config.n_elite]
        if returns[order[0]] > best_return:
            best_return = float(returns[order[0]])
            best_weights = candidates[order[0]].copy()

        mean = candidates[elite].mean(axis=0)
        stats = IterationStats(
            iteration=iteration,
            mean_return=float(returns.mean()),
            elite_mean_return=float(returns[elite].mean()),
            best_return=best_return,
            noise_std=std,
        )
        history.append(stats)
        logger.info("cem iteration %d: mean=%.4f elite=%.4f best=%.4f std=%.4f",
                    iteration, stats.mean_return, stats.elite_mean_return, best_return, std)
        std = max(std * config.noise_decay, NOISE_FLOOR)

    return TrainResult(
        best_policy=LinearPolicy.from_flat(best_weights, config.lookaheads, bounds),
        best_return=best_return,
        history=history,
        total_episodes=total_episodes,
        final_mean=mean,
    )
