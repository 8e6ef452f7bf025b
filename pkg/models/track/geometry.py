"""
Closed-loop Track Geometry

A track is a closed polyline of waypoints. This module derives everything the
simulator, the rewards and the policy features need from it: the arc-length
table, projection of a position onto the centerline, lap progress, Menger
curvature and straight/curved segment classification.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

MIN_WAYPOINTS = 8
MIN_SPACING = 1e-9  # meters
COLLINEAR_AREA = 1e-12  # square meters
PROJECTION_TIE_TOLERANCE = 1e-9  # meters


@dataclass(frozen=True)
class Waypoint:
    """A centerline point in meters."""

    x: float
    y: float


class SegmentClass(str, Enum):
    STRAIGHT = "straight"
    CURVED = "curved"


def menger_curvature(prev: np.ndarray, center: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """
    Unsigned Menger curvature of the circle through three points.

    Works on single points of shape (2,) or stacked stencils of shape (N, 2).
    Stencils whose triangle area falls below 1e-12 m^2 are treated as straight.

    Args:
        prev: Point before the center of the stencil
        center: Point the curvature is assigned to
        nxt: Point after the center of the stencil

    Returns:
        np.ndarray: Curvature in 1/m, zero for degenerate stencils
    """
    prev, center, nxt = (np.asarray(p, dtype=float) for p in (prev, center, nxt))
    u = center - prev
    v = nxt - prev
    area = 0.5 * np.abs(u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0])

    a = np.hypot(*(center - prev).T)
    b = np.hypot(*(nxt - center).T)
    c = np.hypot(*(nxt - prev).T)
    denominator = a * b * c

    degenerate = (area < COLLINEAR_AREA) | (denominator <= 0.0)
    safe = np.where(degenerate, 1.0, denominator)
    return np.where(degenerate, 0.0, 4.0 * area / safe)


class TrackModel:
    """
    Immutable closed track built from ordered waypoints.

    The last waypoint connects back to the first. All derived arrays are
    read-only so a single instance can be shared between rollout workers.
    """

    def __init__(self,
                 waypoints: Union[np.ndarray, Sequence[Sequence[float]], Sequence[Waypoint]],
                 half_width: float = 0.6,
                 name: str = "track"):
        """
        Build the track and its arc-length and curvature tables.

        Args:
            waypoints: (N, 2) array-like of x, y in meters, or Waypoint objects
            half_width: Half of the drivable width in meters
            name: Label used in logs and manifests

        Raises:
            ValueError: If the geometry violates the track invariants
        """
        points = _as_points(waypoints)
        if len(points) < MIN_WAYPOINTS:
            raise ValueError(f"too few waypoints: {len(points)} (need at least {MIN_WAYPOINTS})")
        if not np.all(np.isfinite(points)):
            raise ValueError("waypoint coordinates must be finite")
        if not half_width > 0:
            raise ValueError(f"half_width must be positive, got {half_width}")

        segment_vectors = np.roll(points, -1, axis=0) - points
        segment_lengths = np.hypot(segment_vectors[:, 0], segment_vectors[:, 1])
        short = np.flatnonzero(segment_lengths <= MIN_SPACING)
        if short.size:
            i = int(short[0])
            raise ValueError(
                f"duplicate consecutive waypoints at index {i} and {(i + 1) % len(points)}"
            )

        self.name = name
        self.half_width = float(half_width)
        self.waypoints = _frozen(points)
        self.segment_vectors = _frozen(segment_vectors)
        self.segment_lengths = _frozen(segment_lengths)
        self.cum_arc_length = _frozen(np.concatenate(([0.0], np.cumsum(segment_lengths[:-1]))))
        self.total_length = float(segment_lengths.sum())
        self.segment_headings = _frozen(np.arctan2(segment_vectors[:, 1], segment_vectors[:, 0]))
        self.curvature_samples = _frozen(menger_curvature(
            np.roll(points, 1, axis=0), points, np.roll(points, -1, axis=0)
        ))

    def __len__(self) -> int:
        return len(self.waypoints)

    def __repr__(self) -> str:
        return (f"TrackModel(name={self.name!r}, waypoints={len(self)}, "
                f"total_length={self.total_length:.3f}, half_width={self.half_width})")

    def point_at(self, s: float) -> Tuple[float, float, float]:
        """Centerline position and segment heading at arc coordinate s (wrapped)."""
        s = wrap_arc(self, s)
        index = segment_index_at(self, s)
        fraction = (s - self.cum_arc_length[index]) / self.segment_lengths[index]
        x, y = self.waypoints[index] + fraction * self.segment_vectors[index]
        return float(x), float(y), float(self.segment_headings[index])

    def get_track_info(self) -> Dict[str, Any]:
        """Summary used in run manifests."""
        return {
            "name": self.name,
            "waypoints": len(self),
            "total_length": self.total_length,
            "half_width": self.half_width,
            "max_curvature": float(self.curvature_samples.max()),
        }


def _as_points(waypoints) -> np.ndarray:
    items = list(waypoints)
    if items and isinstance(items[0], Waypoint):
        items = [(w.x, w.y) for w in items]
    points = np.asarray(items, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError(f"waypoints must have shape (N, 2), got {points.shape}")
    return points.copy()


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=float)
    array.setflags(write=False)
    return array


def wrap_arc(track: TrackModel, s: float) -> float:
    """Map any arc coordinate onto [0, total_length)."""
    s = float(s) % track.total_length
    return 0.0 if s >= track.total_length else s


def segment_index_at(track: TrackModel, s: float) -> int:
    """Index of the segment containing arc coordinate s in [0, total_length)."""
    index = int(np.searchsorted(track.cum_arc_length, s, side="right")) - 1
    return min(max(index, 0), len(track) - 1)


def project(track: TrackModel, position: Tuple[float, float]) -> Tuple[float, float, int]:
    """
    Project a position onto the closest point of the closed centerline.

    Args:
        track: Track to project onto
        position: (x, y) in meters

    Returns:
        Tuple of (s, lateral_offset, segment_index). lateral_offset is the signed
        distance to the closest point, positive to the left of travel.
    """
    p = np.asarray(position, dtype=float)
    starts = track.waypoints
    vectors = track.segment_vectors
    lengths_sq = track.segment_lengths ** 2

    rel = p - starts
    t = np.clip((rel[:, 0] * vectors[:, 0] + rel[:, 1] * vectors[:, 1]) / lengths_sq, 0.0, 1.0)
    closest = starts + t[:, None] * vectors
    distances = np.hypot(p[0] - closest[:, 0], p[1] - closest[:, 1])

    # lowest index among near-equal distances
    index = int(np.flatnonzero(distances <= distances.min() + PROJECTION_TIE_TOLERANCE)[0])

    s = track.cum_arc_length[index] + t[index] * track.segment_lengths[index]
    if s >= track.total_length:
        s -= track.total_length
    cross = vectors[index, 0] * rel[index, 1] - vectors[index, 1] * rel[index, 0]
    lateral = distances[index] if cross >= 0 else -distances[index]
    return float(s), float(lateral), index


def progress_at(track: TrackModel, s: float) -> float:
    """Lap fraction s / total_length for s in [0, total_length)."""
    if not 0.0 <= s < track.total_length:
        raise ValueError(f"s must lie in [0, {track.total_length}), got {s}")
    return s / track.total_length


def curvature_at(track: TrackModel, s: float) -> float:
    """Curvature at arc coordinate s, linearly interpolated between waypoint samples."""
    s = wrap_arc(track, s)
    index = segment_index_at(track, s)
    fraction = (s - track.cum_arc_length[index]) / track.segment_lengths[index]
    k0 = track.curvature_samples[index]
    k1 = track.curvature_samples[(index + 1) % len(track)]
    return float((1.0 - fraction) * k0 + fraction * k1)


def mean_curvature(track: TrackModel, s_center: float, window: float) -> float:
    """
    Mean of the waypoint curvature samples within +/- window/2 of s_center.

    The window wraps around the loop. When no sample falls inside, the nearest
    sample is used on its own.
    """
    if not window > 0:
        raise ValueError(f"window must be positive, got {window}")
    gap = np.abs(track.cum_arc_length - wrap_arc(track, s_center))
    gap = np.minimum(gap, track.total_length - gap)
    inside = gap <= window / 2.0
    if not inside.any():
        return float(track.curvature_samples[int(np.argmin(gap))])
    return float(np.mean(track.curvature_samples[inside]))


def classify_segment(track: TrackModel, s: float, threshold: float) -> SegmentClass:
    """Curved when curvature_at(s) >= threshold, otherwise Straight."""
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if curvature_at(track, s) >= threshold:
        return SegmentClass.CURVED
    return SegmentClass.STRAIGHT
