"""
Bounded Linear Policy

Maps ground-truth track features to a (target speed, steering) command. The
two outputs are squashed so every action lies strictly inside the action
bounds: a sigmoid for the speed range and tanh for the steering range.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy.special import expit

from models.track.geometry import TrackModel, curvature_at, project
from models.vehicle.dynamics import Action, SimParams, VehicleState, wrap_angle

DEFAULT_LOOKAHEADS = (0.3, 0.6, 1.0)
BASE_FEATURES = ("lateral_offset", "heading_error", "speed")


class CheckpointError(ValueError):
    """Policy checkpoint missing, unreadable or inconsistent."""


@dataclass(frozen=True)
class ActionBounds:
    speed_min: float = 0.1
    speed_max: float = 1.0
    steering_limit: float = 30.0

    @classmethod
    def from_params(cls, params: SimParams) -> "ActionBounds":
        return cls(params.speed_min, params.speed_max, params.steering_limit)


@dataclass(frozen=True)
class FeatureVector:
    lateral_offset: float
    heading_error: float
    speed: float
    curvature_ahead: Tuple[float, ...]
    bias: float = 1.0

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.lateral_offset, self.heading_error, self.speed, *self.curvature_ahead, self.bias],
            dtype=float,
        )


def feature_dimension(lookaheads: Sequence[float]) -> int:
    return len(BASE_FEATURES) + len(lookaheads) + 1


def featurize(track: TrackModel, state: VehicleState, lookaheads: Sequence[float]) -> FeatureVector:
    """
    Ground-truth features of the vehicle relative to the track.

    heading_error is the vehicle heading minus the local track tangent, wrapped
    to (-pi, pi]. curvature_ahead[i] is the curvature lookaheads[i] meters
    further along the track.
    """
    s, lateral, index = project(track, (state.x, state.y))
    heading_error = wrap_angle(state.heading - float(track.segment_headings[index]))
    ahead = tuple(curvature_at(track, (s + d) % track.total_length) for d in lookaheads)
    return FeatureVector(lateral, heading_error, state.speed, ahead)


def _open_interval(value: float, low: float, high: float) -> float:
    return min(max(value, math.nextafter(low, high)), math.nextafter(high, low))


def act(policy: "LinearPolicy", features: FeatureVector, bounds: ActionBounds = None) -> Action:
    """
    Squashed linear action.

    target_speed = speed_min + (speed_max - speed_min) * sigmoid(pre[0]);
    steering = steering_limit * tanh(pre[1]).

    Raises:
        ValueError: If the feature dimension does not match the weights
    """
    weights = policy.weights
    bounds = bounds if bounds is not None else policy.bounds
    x = features.as_array()
    if weights.shape != (2, x.size):
        raise ValueError(f"policy expects {weights.shape[1]} features, got {x.size}")
    pre = weights @ x
    span = bounds.speed_max - bounds.speed_min
    speed = bounds.speed_min + span * float(expit(pre[0]))
    steering = bounds.steering_limit * math.tanh(float(pre[1]))
    return Action(
        target_speed=_open_interval(speed, bounds.speed_min, bounds.speed_max),
        steering_angle=_open_interval(steering, -bounds.steering_limit, bounds.steering_limit),
    )


class LinearPolicy:
    """
    Linear feature-to-action policy with a (2 x feature-dimension) weight matrix.

    Row 0 drives the target speed, row 1 the steering angle.
    """

    def __init__(self,
                 weights: Union[np.ndarray, Sequence[Sequence[float]], None] = None,
                 lookaheads: Sequence[float] = DEFAULT_LOOKAHEADS,
                 bounds: ActionBounds = None):
        self.lookaheads = tuple(float(d) for d in lookaheads)
        self.bounds = bounds if bounds is not None else ActionBounds()
        dim = feature_dimension(self.lookaheads)
        if weights is None:
            weights = np.zeros((2, dim))
        weights = np.array(weights, dtype=float)
        if weights.shape != (2, dim):
            raise ValueError(f"weights must have shape (2, {dim}), got {weights.shape}")
        if not np.all(np.isfinite(weights)):
            raise ValueError("policy weights must be finite")
        weights.setflags(write=False)
        self.weights = weights

    @classmethod
    def from_flat(cls, flat: np.ndarray, lookaheads: Sequence[float], bounds: ActionBounds) -> "LinearPolicy":
        return cls(np.asarray(flat, dtype=float).reshape(2, feature_dimension(lookaheads)), lookaheads, bounds)

    @property
    def n_parameters(self) -> int:
        return self.weights.size

    def act(self, features: FeatureVector) -> Action:
        return act(self, features, self.bounds)

    def decide(self, track: TrackModel, state: VehicleState) -> Action:
        return self.act(featurize(track, state, self.lookaheads))

    def get_policy_info(self) -> Dict[str, Any]:
        return {
            "type": "linear",
            "features": list(BASE_FEATURES) + [f"curvature_ahead_{d:g}" for d in self.lookaheads] + ["bias"],
            "n_parameters": self.n_parameters,
        }


class _CheckpointBounds(BaseModel):
    model_config = ConfigDict(extra="forbid")

    speed_min: float = Field(gt=0)
    speed_max: float = Field(gt=0)
    steering_limit: float = Field(gt=0)


class PolicyCheckpoint(BaseModel):
    """On-disk policy: feature config, row-major weights, bounds, seed."""

    model_config = ConfigDict(extra="forbid")

    lookaheads: List[float]
    shape: Tuple[int, int]
    weights: List[float]
    action_bounds: _CheckpointBounds
    master_seed: int

    @model_validator(mode="after")
    def _check_shape(self) -> "PolicyCheckpoint":
        expected = (2, feature_dimension(self.lookaheads))
        if tuple(self.shape) != expected:
            raise ValueError(f"shape {tuple(self.shape)} does not match lookaheads (expected {expected})")
        if len(self.weights) != expected[0] * expected[1]:
            raise ValueError(f"weights has {len(self.weights)} entries, expected {expected[0] * expected[1]}")
        return self


def save_checkpoint(policy: LinearPolicy, path: Union[str, Path], master_seed: int) -> Path:
    path = Path(path)
    checkpoint = PolicyCheckpoint(
        lookaheads=list(policy.lookaheads),
        shape=policy.weights.shape,
        weights=policy.weights.ravel().tolist(),
        action_bounds=_CheckpointBounds(
            speed_min=policy.bounds.speed_min,
            speed_max=policy.bounds.speed_max,
            steering_limit=policy.bounds.steering_limit,
        ),
        master_seed=master_seed,
    )
    path.write_text(json.dumps(checkpoint.model_dump(mode="json"), indent=2) + "\n", encoding="utf-8")
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[LinearPolicy, int]:
    """
    Read a policy checkpoint.

    Returns:
        (policy, master_seed)

    Raises:
        CheckpointError: Naming the offending field when the file is invalid
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise CheckpointError(f"{path}: cannot read checkpoint ({e})") from e
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        checkpoint = PolicyCheckpoint.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
        )
        raise CheckpointError(f"{path}: invalid checkpoint ({problems})") from e

    bounds = ActionBounds(**checkpoint.action_bounds.model_dump())
    try:
        policy = LinearPolicy.from_flat(np.array(checkpoint.weights), checkpoint.lookaheads, bounds)
    except ValueError as e:
        raise CheckpointError(f"{path}: weights: {e}") from e
    return policy, checkpoint.master_seed
