"""
Kinematic Bicycle Vehicle Model

Low-speed vehicle model: speed tracks the commanded target with a bounded
acceleration, steering is applied instantly and tire slip is ignored.
"""

import math
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.track.geometry import TrackModel, project


class SimParams(BaseModel):
    """Simulator and action-space parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dt: float = Field(0.0667, gt=0, description="Simulation step in seconds (15 Hz).")
    wheelbase: float = Field(0.16, gt=0, description="Axle distance in meters.")
    max_accel: float = Field(2.0, gt=0, description="Acceleration limit in m/s^2 for speed tracking.")
    max_steps: int = Field(1500, ge=0, description="Episode step limit.")
    off_track_tolerance: float = Field(0.05, ge=0, description="Meters allowed beyond the half width before the car counts as off track.")
    speed_min: float = Field(0.1, gt=0, description="Lowest commandable target speed in m/s.")
    speed_max: float = Field(1.0, gt=0, description="Highest commandable target speed in m/s.")
    steering_limit: float = Field(30.0, gt=0, le=90, description="Steering bound in degrees; actions lie in [-limit, +limit].")
    random_start: bool = Field(False, description="Start each episode at a seeded random arc position instead of s = 0.")
    stall_steps: int = Field(45, ge=0, description="Window in steps for stall detection; 0 disables it.")
    stall_distance: float = Field(0.25, ge=0, description="Minimum net arc advance in meters over the stall window.")
    position_noise: float = Field(0.0, ge=0, description="Std in meters of the localization fix progress is measured from; 0 measures the true position.")
    stop_period: int = Field(0, ge=0, description="Steps between the starts of forced slow-downs (stop-and-go driving); 0 disables them.")
    stop_steps: int = Field(8, ge=1, description="Length in steps of each forced slow-down; the first one starts at step 0.")
    stop_speed: float = Field(0.005, gt=0, description="Target speed in m/s during a forced slow-down; may lie below speed_min.")

    @model_validator(mode="after")
    def _check_speed_range(self) -> "SimParams":
        if self.speed_min >= self.speed_max:
            raise ValueError(f"speed_min ({self.speed_min}) must be below speed_max ({self.speed_max})")
        if self.stop_speed > self.speed_max:
            raise ValueError(f"stop_speed ({self.stop_speed}) must not exceed speed_max ({self.speed_max})")
        if self.stop_period and self.stop_steps >= self.stop_period:
            raise ValueError(f"stop_steps ({self.stop_steps}) must be below stop_period ({self.stop_period})")
        return self

    def stopping(self, t: int) -> bool:
        """True while step t falls inside a forced slow-down."""
        return bool(self.stop_period) and t % self.stop_period < self.stop_steps


@dataclass(frozen=True)
class VehicleState:
    """Pose and speed. heading is in radians within (-pi, pi]."""

    x: float
    y: float
    heading: float
    speed: float


@dataclass(frozen=True)
class Action:
    """Continuous command: target speed in m/s and steering angle in degrees."""

    target_speed: float
    steering_angle: float


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]; in-range values are returned unchanged."""
    if -math.pi < angle <= math.pi:
        return angle
    angle = math.remainder(angle, 2.0 * math.pi)
    return math.pi if angle <= -math.pi else angle


def check_action(action: Action, params: SimParams) -> None:
    """Raise ValueError when the action lies outside the configured bounds."""
    if not params.speed_min <= action.target_speed <= params.speed_max:
        raise ValueError(
            f"target_speed {action.target_speed} outside [{params.speed_min}, {params.speed_max}]"
        )
    if not abs(action.steering_angle) <= params.steering_limit:
        raise ValueError(
            f"steering_angle {action.steering_angle} outside [-{params.steering_limit}, {params.steering_limit}]"
        )


def step(state: VehicleState, action: Action, params: SimParams, stopping: bool = False) -> VehicleState:
    """
    Advance the vehicle by one time step.

    Speed moves toward the target by at most max_accel * dt, then the pose is
    integrated with the updated speed.

    Args:
        state: Current vehicle state
        action: Command within the configured bounds
        params: Simulator parameters
        stopping: Replace the commanded target speed with params.stop_speed
            (the steering command still applies)

    Returns:
        VehicleState: State after dt seconds

    Raises:
        ValueError: If the action is out of bounds
    """
    check_action(action, params)
    dv_max = params.max_accel * params.dt
    target = params.stop_speed if stopping else action.target_speed
    speed = state.speed + min(max(target - state.speed, -dv_max), dv_max)
    speed = max(speed, 0.0)

    x = state.x + speed * math.cos(state.heading) * params.dt
    y = state.y + speed * math.sin(state.heading) * params.dt
    yaw_rate = speed / params.wheelbase * math.tan(math.radians(action.steering_angle))
    heading = wrap_angle(state.heading + yaw_rate * params.dt)
    return VehicleState(x=x, y=y, heading=heading, speed=speed)


def turning_radius(steering_angle: float, wheelbase: float) -> float:
    """Steady-state turning radius in meters for a steering angle in degrees."""
    tangent = math.tan(math.radians(abs(steering_angle)))
    return math.inf if tangent == 0 else wheelbase / tangent


def off_track(track: TrackModel, state: VehicleState, params: SimParams) -> bool:
    """True when the lateral offset strictly exceeds half width plus tolerance."""
    _, lateral, _ = project(track, (state.x, state.y))
    return abs(lateral) > track.half_width + params.off_track_tolerance
