"""
Run directories, manifests and table output.

Layout: <out>/<run-id>/{manifest.json, config.json, *.csv, checkpoint.json}.
Manifests record configs, seeds, the artifact version and a digest of the
config, never a wall-clock time, so reruns produce identical bytes.
"""

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import pandas as pd

PathLike = Union[str, Path]


def run_id(seed: int, now: Optional[datetime] = None) -> str:
    """UTC timestamp plus seed, e.g. 20240101T120000Z-s0."""
    now = now or datetime.now(timezone.utc)
    return f"{now.strftime('%Y%m%dT%H%M%SZ')}-s{seed}"


def make_run_dir(out: PathLike, seed: int, run_name: Optional[str] = None) -> Path:
    """Create and return <out>/<run_name or run_id(seed)>."""
    path = Path(out) / (run_name or run_id(seed))
    path.mkdir(parents=True, exist_ok=True)
    return path


def to_json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n"


def config_digest(config: Dict[str, Any]) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(run_dir: PathLike,
                   command: str,
                   config: Dict[str, Any],
                   seed: int,
                   version: str,
                   artifacts: Iterable[str],
                   extra: Optional[Dict[str, Any]] = None) -> Path:
    """
    Write manifest.json and config.json into run_dir.

    The manifest carries everything needed to regenerate the run's tables:
    the command, the full config, the seed and the artifact version.
    """
    run_dir = Path(run_dir)
    manifest = {
        "command": command,
        "version": version,
        "seed": seed,
        "config_sha256": config_digest(config),
        "artifacts": sorted(set(artifacts)),
        "config": config,
    }
    if extra:
        manifest.update(extra)
    (run_dir / "config.json").write_text(to_json_text(config), encoding="utf-8")
    path = run_dir / "manifest.json"
    path.write_text(to_json_text(manifest), encoding="utf-8")
    return path


def write_table(frame: pd.DataFrame, path: PathLike) -> Path:
    """CSV with a header row, no index and '\\n' line endings."""
    path = Path(path)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path
