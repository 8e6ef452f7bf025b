"""
Tests for the kinematic bicycle model.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from models.vehicle.dynamics import (
    Action,
    SimParams,
    VehicleState,
    check_action,
    off_track,
    step,
    turning_radius,
    wrap_angle,
)
from tests.utils import fit_circle


class TestStep:
    """Test suite for the single-step update."""

    def setup_method(self):
        self.params = SimParams(dt=0.1, max_accel=2.0)

    def test_straight_line_motion(self):
        state = VehicleState(0.0, 0.0, 0.0, 1.0)
        new = step(state, Action(1.0, 0.0), self.params)
        assert new.x == 0.1
        assert new.y == 0.0
        assert new.heading == 0.0
        assert new.speed == 1.0

    def test_accel_limited_start(self):
        new = step(VehicleState(0.0, 0.0, 0.0, 0.0), Action(1.0, 10.0), self.params)
        assert new.speed == pytest.approx(0.2)

    def test_decel_limited(self):
        new = step(VehicleState(0.0, 0.0, 0.0, 1.0), Action(0.1, 0.0), self.params)
        assert new.speed == pytest.approx(0.8)

    def test_zero_steering_preserves_heading(self):
        state = VehicleState(1.0, 2.0, 2.5, 0.7)
        for _ in range(50):
            state = step(state, Action(0.9, 0.0), self.params)
        assert state.heading == 2.5

    def test_heading_stays_wrapped(self):
        state = VehicleState(0.0, 0.0, math.pi - 0.01, 1.0)
        for _ in range(100):
            state = step(state, Action(1.0, 30.0), self.params)
            assert -math.pi < state.heading <= math.pi

    def test_out_of_bounds_action(self):
        state = VehicleState(0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError, match="target_speed"):
            step(state, Action(1.5, 0.0), self.params)
        with pytest.raises(ValueError, match="steering_angle"):
            step(state, Action(0.5, -31.0), self.params)

    def test_bounds_are_inclusive(self):
        check_action(Action(0.1, -30.0), self.params)
        check_action(Action(1.0, 30.0), self.params)

    def test_deterministic(self):
        state = VehicleState(0.3, -0.2, 1.0, 0.4)
        assert step(state, Action(0.8, 12.5), self.params) == step(state, Action(0.8, 12.5), self.params)


@pytest.mark.parametrize("steering", [10.0, 20.0, 30.0])
def test_constant_steering_traces_turning_circle(steering):
    params = SimParams()
    state = VehicleState(0.0, 0.0, 0.0, 0.5)
    points = []
    for _ in range(1000):
        state = step(state, Action(0.5, steering), params)
        points.append((state.x, state.y))
    _, _, radius = fit_circle(np.array(points))
    expected = params.wheelbase / math.tan(math.radians(steering))
    assert radius == pytest.approx(expected, rel=5e-3)


def test_turning_radius():
    assert turning_radius(30.0, 0.16) == pytest.approx(0.277, abs=1e-3)
    assert turning_radius(0.0, 0.16) == math.inf


def test_random_steps_respect_bounds():
    params = SimParams()
    rng = np.random.default_rng(11)
    state = VehicleState(0.0, 0.0, 0.0, 0.0)
    speeds = rng.uniform(params.speed_min, params.speed_max, 100_000)
    angles = rng.uniform(-params.steering_limit, params.steering_limit, 100_000)
    for v, delta in zip(speeds, angles):
        new = step(state, Action(float(v), float(delta)), params)
        assert math.hypot(new.x - state.x, new.y - state.y) <= params.speed_max * params.dt + 1e-12
        assert abs(new.speed - state.speed) <= params.max_accel * params.dt + 1e-12
        state = new


class TestWrapAngle:

    def test_in_range_passthrough(self):
        for angle in (0.0, 1.0, -3.0, math.pi):
            assert wrap_angle(angle) == angle

    def test_wraps_into_half_open_interval(self):
        assert wrap_angle(-math.pi) == math.pi
        assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
        assert wrap_angle(2 * math.pi - 0.2) == pytest.approx(-0.2)


class TestOffTrack:
    """Test suite for the off-track check."""

    def test_centerline(self, square, sim_params):
        assert not off_track(square, VehicleState(5.0, 0.0, 0.0, 0.5), sim_params)

    def test_boundary_is_on_track(self, square):
        params = SimParams(off_track_tolerance=0.25)
        limit = square.half_width + params.off_track_tolerance
        assert not off_track(square, VehicleState(5.0, limit, 0.0, 0.5), params)

    def test_beyond_boundary(self, square, sim_params):
        limit = square.half_width + sim_params.off_track_tolerance
        assert off_track(square, VehicleState(5.0, -(limit + 0.01), 0.0, 0.5), sim_params)


class TestSimParams:

    def test_defaults(self):
        params = SimParams()
        assert params.dt == 0.0667
        assert (params.speed_min, params.speed_max) == (0.1, 1.0)
        assert params.steering_limit == 30.0

    def test_speed_range_must_be_ordered(self):
        with pytest.raises(ValidationError):
            SimParams(speed_min=1.0, speed_max=0.5)

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            SimParams(top_speed=3.0)

    def test_stop_steps_below_period(self):
        with pytest.raises(ValidationError, match="stop_steps"):
            SimParams(stop_period=8, stop_steps=8)

    def test_stop_speed_within_speed_max(self):
        with pytest.raises(ValidationError, match="stop_speed"):
            SimParams(stop_speed=1.5)


class TestStopAndGo:
    """Test suite for forced slow-downs."""

    def setup_method(self):
        self.params = SimParams(dt=0.1, stop_period=20, stop_steps=5, stop_speed=0.005)

    def test_schedule(self):
        assert [t for t in range(45) if self.params.stopping(t)] == [0, 1, 2, 3, 4, 20, 21, 22, 23, 24, 40, 41, 42, 43, 44]
        assert not any(SimParams().stopping(t) for t in range(100))

    def test_stopping_overrides_target_speed(self):
        state = VehicleState(0.0, 0.0, 0.0, 0.0)
        new = step(state, Action(1.0, 10.0), self.params, stopping=True)
        assert new.speed == 0.005
        assert new.x == pytest.approx(0.0005)
        assert new.heading > 0.0

    def test_slow_down_is_acceleration_limited(self):
        new = step(VehicleState(0.0, 0.0, 0.0, 1.0), Action(1.0, 0.0), self.params, stopping=True)
        assert new.speed == pytest.approx(0.8)

    def test_policy_action_still_checked(self):
        with pytest.raises(ValueError, match="target_speed"):
            step(VehicleState(0.0, 0.0, 0.0, 0.0), Action(0.005, 0.0), self.params, stopping=True)
