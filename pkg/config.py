"""
Configuration for trackforge.

Project constants live on Config; run configuration is a pydantic model that
round-trips through JSON unchanged.
"""

import json
from pathlib import Path
from typing import List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from models.policy.cem import TrainConfig
from models.rewards import RewardConfig
from models.vehicle.dynamics import SimParams
from models.workers import THREADS_ENV


class Config:
    """Project-wide constants."""

    PROJECT_NAME = "trackforge"
    VERSION = "0.2.0"

    ROOT = Path(__file__).resolve().parent
    TRACKS_DIR = ROOT / "tracks"
    DEFAULT_TRACK = "tracks/oval.csv"
    DEFAULT_CONFIG_NAME = "trackforge.json"
    DEFAULT_OUTPUT_DIR = "runs"

    THREADS_ENV = THREADS_ENV

    EXPERIMENTS = (
        "velocity-sweep",
        "velocity-scatter",
        "progress-compare",
        "steering-compare",
        "steering-weighted",
        "ablation",
    )

    @classmethod
    def resolve_path(cls, path: Union[str, Path]) -> Path:
        """Relative paths resolve against the working directory, then the project root."""
        path = Path(path)
        if path.is_absolute() or path.exists():
            return path
        bundled = cls.ROOT / path
        return bundled if bundled.exists() else path


class ConfigError(ValueError):
    """Invalid or unreadable run configuration."""


class ExperimentConfig(BaseModel):
    """Parameters of the reward comparison tables and the ablation."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    alphas: Tuple[float, ...] = Field((1.0, 3.0, 5.0), min_length=1, description="Velocity reward steepness values for the sweep.")
    error_max: float = Field(1.0, gt=0, description="Largest speed error in the sweep grid (m/s).")
    error_step: float = Field(0.01, gt=0, description="Sweep grid spacing (m/s).")
    scatter_alpha: float = Field(3.0, gt=0, description="Velocity reward steepness for the random-speed scatter.")
    scatter_n: int = Field(1000, ge=1, description="Number of random actual speeds in the scatter.")
    progress_epsilon: float = Field(0.01, gt=0, description="Epsilon (m) for the progress reward comparison.")
    progress_steps: int = Field(200, ge=1, description="Length of the synthetic distance-increment trace.")
    progress_period: int = Field(50, ge=1, description="Period in steps of the synthetic distance increments.")
    progress_dl_min: float = Field(1e-6, ge=0, description="Smallest synthetic distance increment (m).")
    progress_dprogress: float = Field(0.001, gt=0, description="Synthetic progress increment per step (lap fraction).")
    steering_k: float = Field(0.01, gt=0, description="Steering penalty per degree for the steering comparisons.")
    steering_steps: int = Field(500, ge=1, description="Length of the synthetic steering profiles.")
    weighted_gamma: float = Field(0.1, gt=0, description="Fixed gamma for the weighted steering comparison.")
    curvature_block: int = Field(25, ge=1, description="Steps per straight or arc block in the curvature profile.")
    arc_curvature: float = Field(0.2, gt=0, description="Curvature (1/m) of the arc blocks.")
    ablation_variants: str = Field("progress", description="Variant set for the ablation: progress, steering or weighting.")
    train_seeds: Tuple[int, ...] = Field((0, 1, 2, 3, 4), min_length=1, description="Training seeds per ablation variant; effect sizes need at least two.")
    eval_seeds: Tuple[int, ...] = Field(tuple(range(1000, 1010)), min_length=1, description="Held-out evaluation episode seeds.")
    spike_factor: float = Field(10.0, gt=0, description="Reward spike threshold as a multiple of the median |r_progress|.")
    stop_and_go: bool = Field(False, description="Run the ablation with a noisy localization fix and periodic forced slow-downs to a crawl, overriding sim.position_noise and sim.stop_*.")


class RunConfig(BaseModel):
    """Everything one command needs: track, simulator, reward, training, experiments."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    track: str = Field(Config.DEFAULT_TRACK, description="Track CSV path (x,y header).")
    half_width: float = Field(0.6, gt=0, description="Track half width in meters.")
    sim: SimParams = Field(default_factory=SimParams, description="Simulator and action-space parameters.")
    reward: RewardConfig = Field(default_factory=RewardConfig, description="Reward parameterization.")
    train: TrainConfig = Field(default_factory=TrainConfig, description="Cross-entropy method budget.")
    experiments: ExperimentConfig = Field(default_factory=ExperimentConfig, description="Comparison and ablation settings.")
    output_dir: str = Field(Config.DEFAULT_OUTPUT_DIR, description="Directory run folders are created in.")
    master_seed: int = Field(0, description="Seed every run derives its randomness from; --seed overrides it.")


def _format_errors(error: ValidationError) -> List[str]:
    return [
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
        for err in error.errors()
    ]


def parse_run_config(text: str, source: str = "<string>") -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"{source}: invalid config\n  " + "\n  ".join(_format_errors(e))) from e


def load_run_config(path: Union[str, Path, None] = None) -> RunConfig:
    """
    Load a run configuration; None gives the defaults.

    Raises:
        ConfigError: Unreadable file, bad JSON, or one line per invalid field
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config ({e})") from e
    return parse_run_config(text, str(path))


def dump_run_config(config: RunConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), indent=2) + "\n"


def schema_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.schema.json")


def write_default_config(path: Union[str, Path]) -> Tuple[Path, Path]:
    """
    Write the default RunConfig and, next to it, its JSON schema with a
    description for every field.

    Returns:
        (config path, schema path)
    """
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_run_config(RunConfig()), encoding="utf-8")
    schema = schema_path(path)
    schema.write_text(json.dumps(RunConfig.model_json_schema(), indent=2) + "\n", encoding="utf-8")
    return path, schema
