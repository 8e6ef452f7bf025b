import math
from typing import Tuple

import numpy as np
from scipy.optimize import least_squares

from models.track.geometry import TrackModel, project
from models.vehicle.dynamics import Action, VehicleState


class ConstantPolicy:
    """Policy that ignores the state and always sends the same command."""

    def __init__(self, target_speed: float, steering_angle: float = 0.0):
        self.action = Action(target_speed=target_speed, steering_angle=steering_angle)

    def decide(self, track: TrackModel, state: VehicleState) -> Action:
        return self.action


class CenterlineFollower:
    """Pure-pursuit style controller used to produce completed laps."""

    def __init__(self, target_speed: float = 0.5, lookahead: float = 0.4, wheelbase: float = 0.16,
                 steering_limit: float = 30.0):
        self.target_speed = target_speed
        self.lookahead = lookahead
        self.wheelbase = wheelbase
        self.steering_limit = steering_limit

    def decide(self, track: TrackModel, state: VehicleState) -> Action:
        s, _, _ = project(track, (state.x, state.y))
        gx, gy, _ = track.point_at(s + self.lookahead)
        alpha = math.atan2(gy - state.y, gx - state.x) - state.heading
        alpha = math.atan2(math.sin(alpha), math.cos(alpha))
        delta = math.degrees(math.atan2(2.0 * self.wheelbase * math.sin(alpha), self.lookahead))
        limit = math.nextafter(self.steering_limit, 0.0)
        return Action(self.target_speed, max(-limit, min(limit, delta)))


def fit_circle(points: np.ndarray) -> Tuple[float, float, float]:
    """Least-squares circle fit; returns (cx, cy, radius)."""
    x, y = points[:, 0], points[:, 1]

    def residuals(p):
        return np.hypot(x - p[0], y - p[1]) - p[2]

    start = np.array([x.mean(), y.mean(), np.hypot(x - x.mean(), y - y.mean()).mean()])
    fit = least_squares(residuals, start)
    return float(fit.x[0]), float(fit.x[1]), float(abs(fit.x[2]))


def brute_force_projection(track: TrackModel, position, samples_per_segment: int = 2000) -> float:
    """Minimum distance from position to a densely resampled centerline."""
    p = np.asarray(position, dtype=float)
    t = np.linspace(0.0, 1.0, samples_per_segment)
    pts = track.waypoints[:, None, :] + t[None, :, None] * track.segment_vectors[:, None, :]
    return float(np.min(np.hypot(pts[..., 0] - p[0], pts[..., 1] - p[1])))
