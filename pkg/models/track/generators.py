"""
Synthetic track generators.

All tracks run counter-clockwise so every corner is a left turn, and start at
arc coordinate 0 at the beginning of a straight where one exists.
"""

import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from .geometry import TrackModel

Point = Tuple[float, float]


def circle_track(radius: float = 10.0, spacing_deg: float = 1.0, half_width: float = 0.6) -> TrackModel:
    """Regular polygon approximation of a circle centred on the origin."""
    n = int(round(360.0 / spacing_deg))
    angles = np.arange(n) * (2.0 * math.pi / n)
    points = np.column_stack((radius * np.cos(angles), radius * np.sin(angles)))
    return TrackModel(points, half_width=half_width, name=f"circle_r{radius:g}")


def _arc(center: Point, radius: float, start: float, sweep: float, spacing: float) -> List[Point]:
    n = max(int(math.ceil(abs(sweep) * radius / spacing)), 1)
    return [
        (center[0] + radius * math.cos(start + sweep * i / n),
         center[1] + radius * math.sin(start + sweep * i / n))
        for i in range(n)
    ]


def _line(a: Point, b: Point, spacing: float) -> List[Point]:
    n = max(int(math.ceil(math.hypot(b[0] - a[0], b[1] - a[1]) / spacing)), 1)
    return [(a[0] + (b[0] - a[0]) * i / n, a[1] + (b[1] - a[1]) * i / n) for i in range(n)]


def polygon_track(vertices: List[Point], spacing: float = 1.0, half_width: float = 0.6,
                  name: str = "polygon") -> TrackModel:
    """Sharp-cornered closed polygon with every side sampled at about spacing meters."""
    points: List[Point] = []
    for a, b in zip(vertices, vertices[1:] + vertices[:1]):
        points += _line(a, b, spacing)
    return TrackModel(points, half_width=half_width, name=name)


def rounded_rectangle_track(length: float,
                            width: float,
                            corner_radius: float,
                            spacing: float = 0.1,
                            half_width: float = 0.6,
                            name: str = "rounded_rectangle") -> TrackModel:
    """
    Rectangle of the given outer size with circular corners, traversed CCW.

    A corner radius of half the width gives a stadium (oval) shape.
    """
    r = corner_radius
    if not 0 < r <= min(length, width) / 2.0:
        raise ValueError(f"corner_radius must lie in (0, {min(length, width) / 2.0}], got {r}")
    x0, x1, y0, y1 = 0.0, length, 0.0, width
    half_pi = math.pi / 2.0

    points: List[Point] = []
    points += _line((x0 + r, y0), (x1 - r, y0), spacing) if length > 2 * r else []
    points += _arc((x1 - r, y0 + r), r, -half_pi, half_pi, spacing)
    points += _line((x1, y0 + r), (x1, y1 - r), spacing) if width > 2 * r else []
    points += _arc((x1 - r, y1 - r), r, 0.0, half_pi, spacing)
    points += _line((x1 - r, y1), (x0 + r, y1), spacing) if length > 2 * r else []
    points += _arc((x0 + r, y1 - r), r, half_pi, half_pi, spacing)
    points += _line((x0, y1 - r), (x0, y0 + r), spacing) if width > 2 * r else []
    points += _arc((x0 + r, y0 + r), r, math.pi, half_pi, spacing)
    return TrackModel(points, half_width=half_width, name=name)


def oval_track(straight: float = 4.0, radius: float = 1.5, spacing: float = 0.1, half_width: float = 0.6) -> TrackModel:
    """Stadium track: two straights joined by semicircles, straight start."""
    return rounded_rectangle_track(
        straight + 2 * radius, 2 * radius, radius, spacing=spacing, half_width=half_width, name="oval"
    )


def square_track(side: float = 10.0, corner_radius: float = 0.5, spacing: float = 0.1, half_width: float = 0.6) -> TrackModel:
    """Square with small rounded (discretized 90 degree) corners."""
    return rounded_rectangle_track(side, side, corner_radius, spacing=spacing, half_width=half_width, name="square")


def slow_corner_track(length: float = 6.0, width: float = 3.0, corner_radius: float = 0.4,
                      spacing: float = 0.05, half_width: float = 0.6) -> TrackModel:
    """Rounded rectangle with tight corners that force the car to slow down."""
    return rounded_rectangle_track(length, width, corner_radius, spacing=spacing,
                                   half_width=half_width, name="slow_corner")


GENERATORS: Dict[str, Callable[..., TrackModel]] = {
    "circle": circle_track,
    "oval": oval_track,
    "square": square_track,
    "slow_corner": slow_corner_track,
}
