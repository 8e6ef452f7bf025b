"""
Track file reading and writing.

Track files are UTF-8 CSV with an ``x,y`` header and one waypoint per row in
meters. Lines starting with ``#`` are comments. The loop is closed implicitly.
"""

import io
import math
import re
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from .geometry import MIN_SPACING, MIN_WAYPOINTS, TrackModel


class TrackLoadError(ValueError):
    """Raised when a track file cannot be turned into a TrackModel."""

    def __init__(self, path: Union[str, Path], line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}, line {line}: {message}")


def load_track(path: Union[str, Path], half_width: float = 0.6) -> TrackModel:
    """
    Load a closed track from a waypoint CSV file.

    Args:
        path: Track CSV file
        half_width: Half track width in meters (supplied by the run config)

    Returns:
        TrackModel: Track with arc lengths and curvature computed

    Raises:
        TrackLoadError: On malformed rows, too few waypoints, duplicate
            consecutive points or a non-positive width. The error names the
            line of the file, counting comment and blank lines.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise TrackLoadError(path, 0, f"cannot read file ({e})") from e

    # file line number of every row pandas will see, header first
    kept = [(number, raw) for number, raw in enumerate(lines, start=1) if raw.split("#", 1)[0].strip()]
    if not kept:
        raise TrackLoadError(path, len(lines), "missing 'x,y' header")
    try:
        frame = pd.read_csv(io.StringIO("\n".join(raw for _, raw in kept)), comment="#", header=None,
                            dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        number = kept[int(match.group(1)) - 1][0] if match and int(match.group(1)) <= len(kept) else 0
        raise TrackLoadError(path, number, f"expected 2 columns ({e})") from None

    header = [str(c).strip().lower() for c in frame.iloc[0]]
    if header != ["x", "y"]:
        raise TrackLoadError(path, kept[0][0], f"expected header 'x,y', got {kept[0][1].strip()!r}")
    row_lines = [number for number, _ in kept[1:]]

    coords = frame.iloc[1:].apply(lambda c: pd.to_numeric(c.str.strip(), errors="coerce")).to_numpy(dtype=float)
    missing = np.isnan(coords).any(axis=1)
    if missing.any():
        i = int(np.argmax(missing))
        raise TrackLoadError(path, row_lines[i], f"non-numeric coordinate in {kept[i + 1][1].strip()!r}")
    infinite = ~np.isfinite(coords).all(axis=1)
    if infinite.any():
        raise TrackLoadError(path, row_lines[int(np.argmax(infinite))], "coordinates must be finite")

    if len(coords) < MIN_WAYPOINTS:
        raise TrackLoadError(path, len(lines), f"too few waypoints: {len(coords)} (need at least {MIN_WAYPOINTS})")
    steps = np.hypot(*np.diff(coords, axis=0).T)
    duplicate = steps <= MIN_SPACING
    if duplicate.any():
        raise TrackLoadError(path, row_lines[int(np.argmax(duplicate)) + 1], "duplicate consecutive waypoint")
    if math.hypot(*(coords[0] - coords[-1])) <= MIN_SPACING:
        raise TrackLoadError(path, row_lines[-1], "last waypoint duplicates the first (loop closure is implicit)")
    if not half_width > 0:
        raise TrackLoadError(path, 0, f"half_width must be positive, got {half_width}")

    return TrackModel(coords, half_width=half_width, name=path.stem)


def save_track(track: TrackModel, path: Union[str, Path], comment: str = "") -> Path:
    """Write the track waypoints in the track CSV format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(track.waypoints, columns=["x", "y"])
    with path.open("w", encoding="utf-8", newline="") as handle:
        for text in comment.splitlines():
            handle.write(f"# {text}\n")
        frame.to_csv(handle, index=False, lineterminator="\n")
    return path
