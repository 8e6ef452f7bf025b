"""
Reward Function Family

This module implements the reward terms the policies are trained against:

- velocity reward: exponential (default) or quadratic penalty on speed error
- progress reward: change in lap progress per meter driven, unregularized or
  with a fixed, adaptive, time-decaying or curvature-aware epsilon
- steering penalty: linear or quadratic in the steering change, optionally
  waived in curves through a curvature weight and scaled by v_scale
- composite reward: weighted sum of the three with straight/curved weights

Every function is pure; step-dependent quantities (t, running means) are
passed in through RewardContext.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal, NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.track.geometry import SegmentClass

EPSILON_FLOOR = 1e-9  # meters
GAMMA_FLOOR = 1e-6


class UndefinedReward(ValueError):
    """Progress reward requested with a non-positive distance increment."""


class InvalidParameter(ValueError):
    """Reward parameter outside its admissible range."""


class ProgressMode(str, Enum):
    UNREGULARIZED = "unregularized"
    FIXED_EPSILON = "fixed_epsilon"
    ADAPTIVE_EPSILON = "adaptive_epsilon"
    DECAYING_EPSILON = "decaying_epsilon"
    CONTEXT_EPSILON = "context_epsilon"


class CurveWeighting(str, Enum):
    NONE = "none"
    MIN_FORM = "min"
    RATIONAL_FORM = "rational"


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class VelocityRewardParams(_Params):
    form: Literal["exponential", "quadratic"] = Field("exponential", description="Shape of the speed-error penalty.")
    alpha_v: float = Field(3.0, gt=0, description="Steepness of the velocity reward.")
    v_target: float = Field(1.0, gt=0, description="Desired speed in m/s.")


class ProgressRewardParams(_Params):
    mode: ProgressMode = Field(ProgressMode.FIXED_EPSILON, description="Denominator regularization of the progress reward.")
    epsilon: float = Field(0.01, gt=0, description="Fixed epsilon in meters (fixed and context modes).")
    alpha_eps: float = Field(0.1, gt=0, description="Scale on mean(dL) for the adaptive epsilon.")
    epsilon0: float = Field(0.01, gt=0, description="Initial epsilon in meters for the decaying mode.")
    beta: float = Field(0.001, gt=0, description="Decay rate per step for the decaying mode.")
    alpha_ctx: float = Field(1.0, ge=0, description="Meters of epsilon growth per unit curvature in the context mode.")


class SteeringPenaltyParams(_Params):
    form: Literal["linear", "quadratic"] = Field("linear", description="Penalty in |d_steer| or d_steer^2.")
    k: float = Field(0.01, gt=0, description="Penalty per degree (per degree^2 for the quadratic form).")
    weighting: CurveWeighting = Field(CurveWeighting.RATIONAL_FORM, description="Curvature weighting that waives the penalty in curves.")
    gamma_mode: Literal["fixed", "adaptive"] = Field("adaptive", description="Fixed gamma or gamma = alpha_gamma * mean curvature.")
    gamma: float = Field(0.1, gt=0, description="Gamma when gamma_mode is fixed.")
    alpha_gamma: float = Field(2.0, gt=1, description="Scale on mean curvature when gamma_mode is adaptive.")
    v_scale: float = Field(1.0, gt=0, description="Speed-dependent scaling factor (1 in the low-speed regime).")
    curvature_window: float = Field(2.0, gt=0, description="Arc window in meters for the mean curvature.")


class WeightTriple(_Params):
    w_progress: float = Field(ge=0)
    w_steer: float = Field(ge=0)
    w_velocity: float = Field(ge=0)

    @model_validator(mode="after")
    def _one_positive(self) -> "WeightTriple":
        if max(self.w_progress, self.w_steer, self.w_velocity) <= 0:
            raise ValueError("at least one weight must be strictly positive")
        return self

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.w_progress, self.w_steer, self.w_velocity


class CompositeWeights(_Params):
    straight: WeightTriple = Field(WeightTriple(w_progress=1.0, w_steer=0.1, w_velocity=1.0),
                                   description="Weights on straight segments (speed first).")
    curved: WeightTriple = Field(WeightTriple(w_progress=1.0, w_steer=0.5, w_velocity=0.3),
                                 description="Weights on curved segments (smoothness first).")
    curvature_threshold: float = Field(0.05, gt=0, description="Curvature in 1/m at and above which a segment counts as curved.")


class RewardConfig(_Params):
    """Complete reward parameterization, one group per reward term."""

    velocity: VelocityRewardParams = VelocityRewardParams()
    progress: ProgressRewardParams = ProgressRewardParams()
    steering: SteeringPenaltyParams = SteeringPenaltyParams()
    composite: CompositeWeights = CompositeWeights()


@dataclass(frozen=True)
class RewardContext:
    """Per-step quantities consumed by the reward terms."""

    d_progress: float
    d_l: float
    d_steer: float
    v_actual: float
    curvature: float
    mean_dl: float
    mean_curvature: float
    t: int


class RewardBreakdown(NamedTuple):
    r_total: float
    r_progress: float
    r_steer: float
    r_velocity: float


# Velocity

def velocity_reward(v_actual: float, params: VelocityRewardParams) -> float:
    """exp(-alpha_v * |v_target - v_actual|), in (0, 1]."""
    return math.exp(-params.alpha_v * abs(params.v_target - v_actual))


def velocity_reward_quadratic(v_actual: float, params: VelocityRewardParams) -> float:
    """-alpha_v * (v_target - v_actual)^2, zero at the target speed."""
    return -params.alpha_v * (params.v_target - v_actual) ** 2


# Progress

def progress_reward_raw(d_progress: float, d_l: float) -> float:
    """
    Unregularized progress reward d_progress / d_l.

    Raises:
        UndefinedReward: If d_l <= 0 (small-denominator problem)
    """
    if not d_l > 0:
        raise UndefinedReward(f"progress reward undefined for d_l = {d_l} (small-denominator problem)")
    return d_progress / d_l


def progress_reward_regularized(d_progress: float, d_l: float, epsilon: float) -> float:
    """d_progress / (d_l + epsilon); bounded by |d_progress| / epsilon."""
    if not epsilon > 0:
        raise InvalidParameter(f"epsilon must be positive, got {epsilon}")
    if d_l < 0:
        raise InvalidParameter(f"d_l must be non-negative, got {d_l}")
    return d_progress / (d_l + epsilon)


def epsilon_adaptive(mean_dl: float, alpha_eps: float) -> float:
    """alpha_eps * mean_dl, floored at 1e-9 m."""
    return max(alpha_eps * mean_dl, EPSILON_FLOOR)


def epsilon_decayed(epsilon0: float, beta: float, t: int) -> float:
    """epsilon0 * exp(-beta * t)."""
    return epsilon0 * math.exp(-beta * t)


def epsilon_context(epsilon: float, curvature: float, alpha_ctx: float) -> float:
    """epsilon * (1 + alpha_ctx * curvature): more smoothing in sharper curves."""
    return epsilon * (1.0 + alpha_ctx * curvature)


def progress_epsilon(ctx: RewardContext, params: ProgressRewardParams) -> float:
    """Epsilon for the configured regularized mode."""
    if params.mode is ProgressMode.FIXED_EPSILON:
        return params.epsilon
    if params.mode is ProgressMode.ADAPTIVE_EPSILON:
        return epsilon_adaptive(ctx.mean_dl, params.alpha_eps)
    if params.mode is ProgressMode.DECAYING_EPSILON:
        return epsilon_decayed(params.epsilon0, params.beta, ctx.t)
    if params.mode is ProgressMode.CONTEXT_EPSILON:
        return epsilon_context(params.epsilon, ctx.curvature, params.alpha_ctx)
    raise InvalidParameter(f"mode {params.mode.value} has no epsilon")


def progress_reward(ctx: RewardContext, params: ProgressRewardParams) -> float:
    if params.mode is ProgressMode.UNREGULARIZED:
        return progress_reward_raw(ctx.d_progress, ctx.d_l)
    return progress_reward_regularized(ctx.d_progress, ctx.d_l, progress_epsilon(ctx, params))


# Steering

def steering_penalty(d_steer: float, k: float) -> float:
    """-k * |d_steer|."""
    return -k * abs(d_steer)


def steering_penalty_quadratic(d_steer: float, k: float) -> float:
    """-k * d_steer^2."""
    return -k * d_steer * d_steer


def curve_weight_min(curvature: float, gamma: float) -> float:
    """min(gamma * curvature, 1)."""
    return min(gamma * curvature, 1.0)


def curve_weight_rational(curvature: float, gamma: float) -> float:
    """curvature / (curvature + gamma), strictly below 1."""
    return curvature / (curvature + gamma)


def gamma_adaptive(mean_curvature: float, alpha_gamma: float) -> float:
    """alpha_gamma * mean_curvature, floored at 1e-6."""
    return max(alpha_gamma * mean_curvature, GAMMA_FLOOR)


def steering_penalty_weighted(d_steer: float, k: float, w_curve: float, v_scale: float) -> float:
    """-k * |d_steer| * (1 - w_curve) * v_scale."""
    return steering_penalty(d_steer, k) * (1.0 - w_curve) * v_scale


def curve_weight(ctx: RewardContext, params: SteeringPenaltyParams) -> float:
    """w_curve for the configured weighting and gamma mode."""
    if params.weighting is CurveWeighting.NONE:
        return 0.0
    if params.gamma_mode == "adaptive":
        gamma = gamma_adaptive(ctx.mean_curvature, params.alpha_gamma)
    else:
        gamma = params.gamma
    if params.weighting is CurveWeighting.MIN_FORM:
        return curve_weight_min(ctx.curvature, gamma)
    return curve_weight_rational(ctx.curvature, gamma)


def steering_reward(ctx: RewardContext, params: SteeringPenaltyParams) -> float:
    w_curve = curve_weight(ctx, params)
    if params.form == "quadratic":
        return steering_penalty_quadratic(ctx.d_steer, params.k) * (1.0 - w_curve) * params.v_scale
    return steering_penalty_weighted(ctx.d_steer, params.k, w_curve, params.v_scale)


# Composite

def segment_weights(config: CompositeWeights, segment: SegmentClass) -> Tuple[float, float, float]:
    """(w_progress, w_steer, w_velocity) configured for the segment class."""
    triple = config.curved if segment is SegmentClass.CURVED else config.straight
    return triple.as_tuple()


def composite_reward(ctx: RewardContext,
                     weights: Tuple[float, float, float],
                     config: RewardConfig) -> RewardBreakdown:
    """
    Weighted sum of the progress, steering and velocity terms.

    Args:
        ctx: Step quantities
        weights: (w_progress, w_steer, w_velocity) for the current segment
        config: Parameters of every term

    Returns:
        RewardBreakdown: (r_total, r_progress, r_steer, r_velocity)

    Raises:
        UndefinedReward: Only in unregularized mode with d_l = 0
    """
    w_progress, w_steer, w_velocity = weights
    r_progress = progress_reward(ctx, config.progress)
    r_steer = steering_reward(ctx, config.steering)
    if config.velocity.form == "quadratic":
        r_velocity = velocity_reward_quadratic(ctx.v_actual, config.velocity)
    else:
        r_velocity = velocity_reward(ctx.v_actual, config.velocity)
    r_total = w_progress * r_progress + w_steer * r_steer + w_velocity * r_velocity
    return RewardBreakdown(r_total, r_progress, r_steer, r_velocity)


class RewardCalculator:
    """
    Composite reward bound to one RewardConfig.

    Picks the straight or curved weight triple for each step and evaluates the
    composite reward. Holds no per-episode state.
    """

    def __init__(self, config: RewardConfig = None):
        if config is None:
            config = RewardConfig()
        self.config = config
        self.name = "Composite Reward"

    def __call__(self, ctx: RewardContext, segment: SegmentClass) -> RewardBreakdown:
        return composite_reward(ctx, segment_weights(self.config.composite, segment), self.config)

    def get_reward_info(self):
        """Summary used in run manifests."""
        return {
            "name": self.name,
            "velocity_form": self.config.velocity.form,
            "progress_mode": self.config.progress.mode.value,
            "steering_form": self.config.steering.form,
            "curve_weighting": self.config.steering.weighting.value,
            "gamma_mode": self.config.steering.gamma_mode,
        }
