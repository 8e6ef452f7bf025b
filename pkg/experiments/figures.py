"""
Reward comparison tables.

Each function regenerates one comparison from seeded synthetic inputs and
returns a plot-ready pandas DataFrame. Nothing here trains or simulates.
"""

from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from experiments.generators import ProgressTrace, abrupt_steering_profile, smooth_steering_profile
from models.rewards import (
    InvalidParameter,
    VelocityRewardParams,
    curve_weight_min,
    curve_weight_rational,
    progress_reward_raw,
    progress_reward_regularized,
    steering_penalty,
    steering_penalty_weighted,
    velocity_reward,
)

SCATTER_V_TARGET = 1.0  # m/s


def default_error_grid() -> np.ndarray:
    """Speed errors 0.00, 0.01, ..., 1.00 m/s."""
    return np.round(np.arange(101) * 0.01, 10)


def sweep_velocity_reward(alphas: Sequence[float], error_grid: Sequence[float]) -> pd.DataFrame:
    """
    Velocity reward for every (alpha, error) pair.

    The target is held at 1 m/s and the actual speed at 1 - error.
    """
    if any(a <= 0 for a in alphas):
        raise InvalidParameter(f"alphas must be positive, got {list(alphas)}")
    rows = []
    for alpha in alphas:
        for error in error_grid:
            params = VelocityRewardParams(alpha_v=alpha, v_target=SCATTER_V_TARGET)
            rows.append((float(alpha), float(error),
                         velocity_reward(SCATTER_V_TARGET - float(error), params)))
    return pd.DataFrame(rows, columns=["alpha", "error", "reward"])


def scatter_velocity_reward(alpha: float, n: int, seed: int) -> pd.DataFrame:
    """n uniform actual speeds in [0, 1] m/s scored against a 1 m/s target."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    params = VelocityRewardParams(alpha_v=alpha, v_target=SCATTER_V_TARGET)
    v_actual = np.random.default_rng(seed).uniform(0.0, 1.0, size=n)
    error = np.abs(SCATTER_V_TARGET - v_actual)
    reward = [velocity_reward(v, params) for v in v_actual]
    return pd.DataFrame({"v_actual": v_actual, "error": error, "reward": reward})


def compare_progress_rewards(trace: ProgressTrace, epsilon: float) -> pd.DataFrame:
    """
    Unregularized against regularized progress reward along a synthetic trace.

    r_raw is NaN (undefined) wherever dl == 0; r_regularized is always finite.
    """
    if not epsilon > 0:
        raise InvalidParameter(f"epsilon must be positive, got {epsilon}")
    rows = []
    for t, (dl, dp) in enumerate(zip(trace.dl, trace.dprogress)):
        raw = progress_reward_raw(dp, dl) if dl > 0 else np.nan
        rows.append((t, float(dl), float(dp), raw, progress_reward_regularized(dp, dl, epsilon)))
    return pd.DataFrame(rows, columns=["t", "dl", "dprogress", "r_raw", "r_regularized"])


def compare_steering_penalties(k: float, n_steps: int, seed: int,
                               smooth_amplitude: float = 2.0) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Linear steering penalty under smooth and abrupt steering.

    Returns:
        (table, summary): per-step table (t, dsteer_smooth, r_smooth,
        dsteer_abrupt, r_abrupt) and a one-row summary of mean |penalty| per
        scenario.
    """
    smooth = smooth_steering_profile(n_steps, amplitude=smooth_amplitude)
    abrupt = abrupt_steering_profile(n_steps, seed)
    table = pd.DataFrame({
        "t": np.arange(n_steps),
        "dsteer_smooth": smooth,
        "r_smooth": [steering_penalty(d, k) for d in smooth],
        "dsteer_abrupt": abrupt,
        "r_abrupt": [steering_penalty(d, k) for d in abrupt],
    })
    summary = pd.DataFrame([{
        "k": k,
        "seed": seed,
        "mean_abs_smooth": float(table["r_smooth"].abs().mean()),
        "mean_abs_abrupt": float(table["r_abrupt"].abs().mean()),
    }])
    return table, summary


def compare_weighted_steering(k: float,
                              gamma: float,
                              curvature_profile: Sequence[float],
                              steering_profile: Sequence[float],
                              weighting: str = "rational") -> pd.DataFrame:
    """
    Unweighted against curvature-weighted steering penalty, step by step.

    Uses a fixed gamma and v_scale = 1. With the rational form, w_curve is zero
    exactly where the curvature is zero.
    """
    if len(curvature_profile) != len(steering_profile):
        raise ValueError("curvature and steering profiles must have the same length")
    if not gamma > 0:
        raise InvalidParameter(f"gamma must be positive, got {gamma}")
    weight_fn = {"rational": curve_weight_rational, "min": curve_weight_min}.get(weighting)
    if weight_fn is None:
        raise InvalidParameter(f"unknown weighting {weighting!r}")

    rows = []
    for t, (kappa, d_steer) in enumerate(zip(curvature_profile, steering_profile)):
        w = weight_fn(float(kappa), gamma)
        rows.append((t, float(kappa), float(d_steer), w,
                     steering_penalty(d_steer, k),
                     steering_penalty_weighted(d_steer, k, w, 1.0)))
    return pd.DataFrame(rows, columns=["t", "curvature", "dsteer", "w_curve", "r_unweighted", "r_weighted"])
