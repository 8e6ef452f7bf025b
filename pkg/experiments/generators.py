"""
Seeded synthetic sequences behind the reward comparison tables.
"""

from dataclasses import dataclass

import numpy as np

SMOOTH_PERIOD = 50  # steps
ABRUPT_LIMIT = 25.0  # degrees


@dataclass(frozen=True)
class ProgressTrace:
    """Per-step distance increments (m) and progress increments (lap fraction)."""

    dl: np.ndarray
    dprogress: np.ndarray

    def __len__(self) -> int:
        return len(self.dl)


def sinusoidal_progress_trace(n_steps: int = 200,
                              period: int = 50,
                              dl_peak: float = 0.06,
                              dl_min: float = 1e-6,
                              dprogress: float = 0.001,
                              jitter: float = 0.0,
                              stop_every: int = 0,
                              seed: int = 0) -> ProgressTrace:
    """
    Distance increments that swing sinusoidally between dl_min and dl_peak.

    The first step of every period sits exactly at dl_min. With stop_every > 0,
    every stop_every-th step is a full stop (dl = 0). Progress increments are
    dprogress, optionally raised by a seeded uniform jitter in [0, jitter).
    """
    if n_steps <= 0 or period <= 0:
        raise ValueError("n_steps and period must be positive")
    t = np.arange(n_steps)
    dl = dl_min + (dl_peak - dl_min) * 0.5 * (1.0 - np.cos(2.0 * np.pi * t / period))
    if stop_every:
        dl[stop_every - 1::stop_every] = 0.0
    rng = np.random.default_rng(seed)
    dp = dprogress * (1.0 + jitter * rng.random(n_steps))
    return ProgressTrace(dl=dl, dprogress=dp)


def smooth_steering_profile(n_steps: int, amplitude: float = 2.0, period: int = SMOOTH_PERIOD) -> np.ndarray:
    """Steering changes amplitude * sin(2 pi t / period) in degrees."""
    t = np.arange(n_steps)
    return amplitude * np.sin(2.0 * np.pi * t / period)


def abrupt_steering_profile(n_steps: int, seed: int, limit: float = ABRUPT_LIMIT) -> np.ndarray:
    """Steering changes drawn uniformly from [-limit, +limit] degrees."""
    return np.random.default_rng(seed).uniform(-limit, limit, size=n_steps)


def block_curvature_profile(n_steps: int, block: int = 25, arc_curvature: float = 0.2) -> np.ndarray:
    """Alternating straight (0) and arc (arc_curvature) blocks, straight first."""
    t = np.arange(n_steps)
    return np.where((t // block) % 2 == 1, arc_curvature, 0.0)
