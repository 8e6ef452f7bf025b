"""
Episode rollouts and traces.

A rollout drives one policy around a track from a fixed (or seeded random)
start pose and records every step's kinematics and reward components.
"""

import io
import logging
import math
from dataclasses import astuple, dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import List, Optional, Protocol, Tuple, Union

import numpy as np
import pandas as pd

from models.rewards import RewardCalculator, RewardConfig, RewardContext
from models.track.geometry import (
    TrackModel,
    classify_segment,
    curvature_at,
    mean_curvature,
    project,
)
from models.vehicle.dynamics import Action, SimParams, VehicleState, step

logger = logging.getLogger(__name__)

TRACE_COLUMNS = [
    "t", "x", "y", "heading", "speed", "target_speed", "steering", "s",
    "dprogress", "dl", "dsteer", "curvature",
    "r_velocity", "r_progress", "r_steer", "r_total",
]


class TerminationReason(str, Enum):
    COMPLETED = "Completed"
    OFF_TRACK = "OffTrack"
    MAX_STEPS = "MaxSteps"
    STALLED = "Stalled"


class DrivingPolicy(Protocol):
    def decide(self, track: TrackModel, state: VehicleState) -> Action:
        ...


@dataclass(frozen=True)
class StepRecord:
    """One row of an episode trace, in TRACE_COLUMNS order."""

    t: int
    x: float
    y: float
    heading: float
    speed: float
    target_speed: float
    steering: float
    s: float
    dprogress: float
    dl: float
    dsteer: float
    curvature: float
    r_velocity: float
    r_progress: float
    r_steer: float
    r_total: float


@dataclass
class EpisodeTrace:
    records: List[StepRecord] = field(default_factory=list)
    termination: TerminationReason = TerminationReason.MAX_STEPS
    seed: Optional[int] = None

    def __len__(self) -> int:
        return len(self.records)

    @property
    def total_return(self) -> float:
        return float(sum(r.r_total for r in self.records))

    @property
    def completed(self) -> bool:
        return self.termination is TerminationReason.COMPLETED

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([astuple(r) for r in self.records], columns=TRACE_COLUMNS)

    def to_csv(self, path: Union[str, Path, None] = None) -> str:
        """
        Serialize in the trace CSV format, with the termination reason on a
        trailing ``# terminated=<reason>`` line. Writes to path when given.
        """
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, index=False, lineterminator="\n")
        buffer.write(f"# terminated={self.termination.value}\n")
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "EpisodeTrace":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        termination = None
        for line in reversed(text.splitlines()):
            if line.startswith("# terminated="):
                termination = TerminationReason(line.split("=", 1)[1].strip())
                break
        if termination is None:
            raise ValueError(f"{path}: missing '# terminated=<reason>' line")

        frame = pd.read_csv(io.StringIO(text), comment="#", float_precision="round_trip")
        if list(frame.columns) != TRACE_COLUMNS:
            raise ValueError(f"{path}: unexpected trace header {list(frame.columns)}")
        kinds = [f.type for f in fields(StepRecord)]
        records = [
            StepRecord(*(int(v) if kind in (int, "int") else float(v) for v, kind in zip(row, kinds)))
            for row in frame.itertuples(index=False, name=None)
        ]
        return cls(records=records, termination=termination)


def wrapped_progress(track: TrackModel, s_prev: float, s_new: float) -> float:
    """Progress difference in lap fractions, wrapped to [-0.5, 0.5)."""
    delta = (s_new - s_prev) / track.total_length
    return (delta + 0.5) % 1.0 - 0.5


def start_state(track: TrackModel, params: SimParams, seed: int) -> VehicleState:
    """Centered, tangent-aligned, standing start at s = 0 (or seeded random s)."""
    s0 = 0.0
    if params.random_start:
        s0 = float(np.random.default_rng(seed).uniform(0.0, track.total_length))
    x, y, heading = track.point_at(s0)
    return VehicleState(x=x, y=y, heading=heading, speed=0.0)


class Localizer:
    """
    Position fix that progress is measured from: the true position plus
    seeded Gaussian noise of params.position_noise meters per axis.
    """

    NOISE_STREAM = 1

    def __init__(self, params: SimParams, seed: int):
        self.noise = params.position_noise
        self.rng = np.random.default_rng([seed, self.NOISE_STREAM]) if self.noise > 0 else None

    def __call__(self, state: VehicleState) -> Tuple[float, float]:
        if self.rng is None:
            return state.x, state.y
        dx, dy = self.rng.normal(0.0, self.noise, 2)
        return state.x + float(dx), state.y + float(dy)


def rollout(policy: DrivingPolicy,
            track: TrackModel,
            reward_config: RewardConfig,
            params: SimParams,
            seed: int) -> EpisodeTrace:
    """
    Run one episode until lap completion, leaving the track, stalling or
    reaching max_steps.

    Args:
        policy: Anything with decide(track, state) -> Action
        track: Track to drive on
        reward_config: Reward parameterization recorded per step
        params: Simulator parameters
        seed: Per-episode seed for the random start and the localization noise

    Returns:
        EpisodeTrace: Step records and termination reason

    dl is the distance the car actually covered; dprogress and s come from
    the (possibly noisy) localization fix. During forced slow-downs the
    recorded target_speed is params.stop_speed.
    """
    calculator = RewardCalculator(reward_config)
    composite = reward_config.composite
    window = reward_config.steering.curvature_window
    localize = Localizer(params, seed)

    state = start_state(track, params, seed)
    s_prev, _, _ = project(track, localize(state))
    prev_steering = 0.0
    cumulative_progress = 0.0
    dl_sum = 0.0
    advance_history = [0.0]
    trace = EpisodeTrace(seed=seed)

    for t in range(params.max_steps):
        action = policy.decide(track, state)
        stopping = params.stopping(t)
        new_state = step(state, action, params, stopping)
        s_new, lateral, _ = project(track, (new_state.x, new_state.y))
        if localize.rng is not None:
            s_new, _, _ = project(track, localize(new_state))

        d_progress = wrapped_progress(track, s_prev, s_new)
        d_l = math.hypot(new_state.x - state.x, new_state.y - state.y)
        d_steer = action.steering_angle - prev_steering
        dl_sum += d_l
        curvature = curvature_at(track, s_new)

        ctx = RewardContext(
            d_progress=d_progress,
            d_l=d_l,
            d_steer=d_steer,
            v_actual=new_state.speed,
            curvature=curvature,
            mean_dl=dl_sum / (t + 1),
            mean_curvature=mean_curvature(track, s_new, window),
            t=t,
        )
        reward = calculator(ctx, classify_segment(track, s_new, composite.curvature_threshold))
        trace.records.append(StepRecord(
            t, new_state.x, new_state.y, new_state.heading, new_state.speed,
            params.stop_speed if stopping else action.target_speed, action.steering_angle, s_new,
            d_progress, d_l, d_steer, curvature,
            reward.r_velocity, reward.r_progress, reward.r_steer, reward.r_total,
        ))

        cumulative_progress += d_progress
        advance_history.append(cumulative_progress * track.total_length)
        state, s_prev, prev_steering = new_state, s_new, action.steering_angle

        if abs(lateral) > track.half_width + params.off_track_tolerance:
            trace.termination = TerminationReason.OFF_TRACK
            break
        if cumulative_progress >= 1.0:
            trace.termination = TerminationReason.COMPLETED
            break
        if params.stall_steps and len(trace.records) >= params.stall_steps:
            if advance_history[-1] - advance_history[-1 - params.stall_steps] < params.stall_distance:
                trace.termination = TerminationReason.STALLED
                break
    else:
        trace.termination = TerminationReason.MAX_STEPS

    logger.debug("rollout seed=%s steps=%d termination=%s return=%.4f",
                 seed, len(trace), trace.termination.value, trace.total_return)
    return trace
