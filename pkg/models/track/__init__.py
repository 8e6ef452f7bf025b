"""
Closed-loop track geometry.

Waypoint polylines with arc-length lookup, projection, curvature and
straight/curved segment classification, plus CSV loading and generators.
"""

from .geometry import SegmentClass, TrackModel, classify_segment, curvature_at, project, progress_at
from .io import TrackLoadError, load_track, save_track
from .generators import GENERATORS

__all__ = [
    "SegmentClass",
    "TrackModel",
    "classify_segment",
    "curvature_at",
    "project",
    "progress_at",
    "TrackLoadError",
    "load_track",
    "save_track",
    "GENERATORS",
]
