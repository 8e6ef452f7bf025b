import pytest

from config import Config
from models.rewards import RewardConfig
from models.track.generators import circle_track, oval_track, polygon_track
from models.track.io import load_track
from models.vehicle.dynamics import SimParams


# Shared tracks and parameters
@pytest.fixture
def circle():
    """Circle of radius 10 m sampled every degree."""
    return circle_track(radius=10.0)


@pytest.fixture
def square():
    """Sharp-cornered 10 m square sampled every meter (40 waypoints)."""
    return polygon_track([(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)], spacing=1.0, name="square")


@pytest.fixture
def oval():
    """Stadium track with a 4 m straight start."""
    return oval_track()


@pytest.fixture
def bundled_oval():
    return load_track(Config.TRACKS_DIR / "oval.csv")


@pytest.fixture
def bundled_slow_corner():
    return load_track(Config.TRACKS_DIR / "slow_corner.csv")


@pytest.fixture
def sim_params():
    """Default simulator parameters."""
    return SimParams()


@pytest.fixture
def reward_config():
    return RewardConfig()


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    """Run worker pools serially unless a test asks otherwise."""
    monkeypatch.setenv(Config.THREADS_ENV, "1")
