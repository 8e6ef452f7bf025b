"""
Reward-variant ablations.

Trains one policy per (variant, training seed) under an identical budget,
evaluates it on held-out seeds and summarizes the evaluation traces. The
summary is computed only from the traces, so it can be recomputed from the
persisted CSV files.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from models.policy.cem import TrainConfig, train_cem
from models.policy.evaluation import evaluate_policy
from models.rewards import (
    CompositeWeights,
    CurveWeighting,
    ProgressMode,
    ProgressRewardParams,
    RewardConfig,
    SteeringPenaltyParams,
    WeightTriple,
)
from models.track.geometry import TrackModel
from models.vehicle.dynamics import SimParams
from models.vehicle.rollout import EpisodeTrace

logger = logging.getLogger(__name__)

DEFAULT_SPIKE_FACTOR = 10.0
REPORT_METRICS = ("smoothness", "completion_rate", "spike_fraction", "mean_speed", "mean_lap_time")
SUMMARY_METRICS = ("completion_rate", "mean_lap_time", "mean_speed", "smoothness", "reward_variance", "spike_fraction")


@dataclass(frozen=True)
class AblationVariant:
    name: str
    reward: RewardConfig


@dataclass(frozen=True)
class AblationSummary:
    """Evaluation statistics of one trained (variant, training seed) pair."""

    variant: str
    train_seed: int
    status: str
    completion_rate: float = math.nan
    mean_lap_time: float = math.nan
    mean_speed: float = math.nan
    smoothness: float = math.nan
    reward_variance: float = math.nan
    spike_fraction: float = math.nan
    episodes: int = 0
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class AblationResult:
    summaries: List[AblationSummary]
    report: pd.DataFrame
    traces: Dict[str, EpisodeTrace] = field(default_factory=dict, repr=False)

    def summary_frame(self) -> pd.DataFrame:
        """Per-seed rows followed by one "mean" row per variant (blank train_seed)."""
        frame = pd.DataFrame([asdict(s) for s in self.summaries] + variant_means(self.summaries),
                             columns=[f.name for f in fields(AblationSummary)])
        frame["train_seed"] = frame["train_seed"].astype("Int64")
        return frame


def variant_means(summaries: Sequence[AblationSummary]) -> List[Dict[str, object]]:
    """
    One row per variant averaging the metrics of its successful seeds.

    episodes is the total over those seeds; error counts the failed seeds.
    """
    rows = []
    for variant in dict.fromkeys(s.variant for s in summaries):
        runs = [s for s in summaries if s.variant == variant]
        ok = [s for s in runs if s.ok]
        row: Dict[str, object] = {"variant": variant, "train_seed": None, "status": "mean"}
        for m in SUMMARY_METRICS:
            values = [getattr(s, m) for s in ok if not math.isnan(getattr(s, m))]
            row[m] = float(np.mean(values)) if values else math.nan
        row["episodes"] = sum(s.episodes for s in ok)
        failed = len(runs) - len(ok)
        row["error"] = f"{failed} failed" if failed else ""
        rows.append(row)
    return rows


def spike_fraction(values: Sequence[float], factor: float = DEFAULT_SPIKE_FACTOR) -> float:
    """
    Fraction of values whose magnitude exceeds factor * median magnitude.

    Returns 0 for an empty sequence.
    """
    magnitudes = np.abs(np.asarray(values, dtype=float))
    if magnitudes.size == 0:
        return 0.0
    threshold = factor * float(np.median(magnitudes))
    return float(np.mean(magnitudes > threshold))


def summarize_traces(traces: Sequence[EpisodeTrace],
                     dt: float,
                     spike_factor: float = DEFAULT_SPIKE_FACTOR) -> Dict[str, float]:
    """
    Pooled statistics over evaluation traces.

    Per-step quantities (speed, |dsteer|, r_total, r_progress) are pooled across
    all traces; lap time averages completed traces only and is NaN when none
    completed.
    """
    if not traces:
        raise ValueError("summarize_traces needs at least one trace")

    def pooled(column: str) -> np.ndarray:
        parts = [t.column(column) for t in traces if len(t)]
        return np.concatenate(parts) if parts else np.zeros(0)

    speed = pooled("speed")
    dsteer = pooled("dsteer")
    r_total = pooled("r_total")
    lap_times = [len(t) * dt for t in traces if t.completed]
    return {
        "completion_rate": float(np.mean([t.completed for t in traces])),
        "mean_lap_time": float(np.mean(lap_times)) if lap_times else math.nan,
        "mean_speed": float(np.mean(speed)) if speed.size else 0.0,
        "smoothness": float(np.mean(np.abs(dsteer))) if dsteer.size else 0.0,
        "reward_variance": float(np.var(r_total)) if r_total.size else 0.0,
        "spike_fraction": spike_fraction(pooled("r_progress"), spike_factor),
        "episodes": len(traces),
    }


def trace_filename(variant: str, train_seed: int, eval_seed: int) -> str:
    return f"{variant}_train{train_seed}_eval{eval_seed}.csv"


def directional_report(summaries: Sequence[AblationSummary],
                       metrics: Sequence[str] = REPORT_METRICS) -> pd.DataFrame:
    """
    Compare every variant to the first (baseline) variant.

    For each metric: mean over training seeds, the difference to the baseline,
    its direction and, with at least two seeds on both sides, the difference
    divided by the pooled standard deviation. Failed runs are left out.
    """
    order: List[str] = []
    values: Dict[str, Dict[str, List[float]]] = {}
    for s in summaries:
        if s.variant not in order:
            order.append(s.variant)
        if not s.ok:
            continue
        per_metric = values.setdefault(s.variant, {m: [] for m in metrics})
        for m in metrics:
            v = getattr(s, m)
            if not math.isnan(v):
                per_metric[m].append(v)

    columns = ["variant", "baseline", "metric", "baseline_mean", "variant_mean",
               "difference", "direction", "effect_size"]
    if not order:
        return pd.DataFrame(columns=columns)

    baseline = order[0]
    rows = []
    for variant in order[1:]:
        for m in metrics:
            base = values.get(baseline, {}).get(m, [])
            other = values.get(variant, {}).get(m, [])
            base_mean = float(np.mean(base)) if base else math.nan
            other_mean = float(np.mean(other)) if other else math.nan
            diff = other_mean - base_mean
            if math.isnan(diff):
                direction = "n/a"
            else:
                direction = "higher" if diff > 0 else "lower" if diff < 0 else "equal"
            effect = math.nan
            if len(base) >= 2 and len(other) >= 2:
                pooled_sd = math.sqrt((np.var(base, ddof=1) + np.var(other, ddof=1)) / 2.0)
                if pooled_sd > 0:
                    effect = diff / pooled_sd
                elif diff == 0:
                    effect = 0.0
            rows.append((variant, baseline, m, base_mean, other_mean, diff, direction, effect))
    return pd.DataFrame(rows, columns=columns)


def run_ablation(track: TrackModel,
                 variants: Sequence[AblationVariant],
                 train_config: TrainConfig,
                 params: SimParams,
                 eval_seeds: Sequence[int],
                 train_seeds: Optional[Sequence[int]] = None,
                 trace_dir: Union[str, Path, None] = None,
                 spike_factor: float = DEFAULT_SPIKE_FACTOR,
                 workers: Optional[int] = None) -> AblationResult:
    """
    Train and evaluate every reward variant under the same budget and seeds.

    Args:
        track: Track for training and evaluation
        variants: At least two named reward configurations; the first is the
            baseline of the directional report
        train_config: Shared CEM budget; master_seed is replaced per training seed
        params: Simulator parameters
        eval_seeds: Held-out evaluation episode seeds
        train_seeds: Training seeds (defaults to train_config.master_seed)
        trace_dir: Directory the evaluation traces are written to
        spike_factor: Spike threshold as a multiple of the median |r_progress|
        workers: Worker threads for episode evaluation

    Returns:
        AblationResult: One summary per (variant, training seed), the
        directional report and the evaluation traces keyed by trace file name
    """
    if len(variants) < 2:
        raise ValueError("an ablation needs at least two variants")
    names = [v.name for v in variants]
    if len(set(names)) != len(names):
        raise ValueError(f"variant names must be unique, got {names}")
    if not eval_seeds:
        raise ValueError("an ablation needs at least one evaluation seed")
    train_seeds = list(train_seeds) if train_seeds else [train_config.master_seed]
    if trace_dir is not None:
        trace_dir = Path(trace_dir)
        trace_dir.mkdir(parents=True, exist_ok=True)

    summaries: List[AblationSummary] = []
    all_traces: Dict[str, EpisodeTrace] = {}
    for variant in variants:
        for seed in train_seeds:
            config = train_config.model_copy(update={"master_seed": int(seed)})
            try:
                trained = train_cem(track, variant.reward, params, config, workers=workers)
                evaluation = evaluate_policy(trained.best_policy, track, variant.reward, params,
                                             eval_seeds, keep_traces=True, workers=workers)
            except ValueError as e:
                logger.warning("ablation variant %s (seed %d) failed: %s", variant.name, seed, e)
                summaries.append(AblationSummary(variant.name, int(seed), "failed", error=str(e)))
                continue

            for trace in evaluation.traces:
                name = trace_filename(variant.name, int(seed), trace.seed)
                all_traces[name] = trace
                if trace_dir is not None:
                    trace.to_csv(trace_dir / name)

            stats = summarize_traces(evaluation.traces, params.dt, spike_factor)
            summaries.append(AblationSummary(variant.name, int(seed), "ok", **stats))
            logger.info("ablation %s seed %d: completion=%.2f smoothness=%.3f spikes=%.4f",
                        variant.name, seed, stats["completion_rate"], stats["smoothness"],
                        stats["spike_fraction"])

    return AblationResult(summaries, directional_report(summaries), all_traces)


def progress_variants() -> List[AblationVariant]:
    """Unregularized progress reward against the fixed-epsilon form."""
    return [
        AblationVariant("unregularized", RewardConfig(progress=ProgressRewardParams(mode=ProgressMode.UNREGULARIZED))),
        AblationVariant("fixed_epsilon", RewardConfig(progress=ProgressRewardParams(mode=ProgressMode.FIXED_EPSILON))),
    ]


def steering_weight_variants() -> List[AblationVariant]:
    """No steering penalty in curves against w_steer = 0.5 in curves."""
    straight = CompositeWeights().straight
    return [
        AblationVariant("curved_w_steer_0", RewardConfig(composite=CompositeWeights(
            straight=straight, curved=WeightTriple(w_progress=1.0, w_steer=0.0, w_velocity=0.3)))),
        AblationVariant("curved_w_steer_0.5", RewardConfig(composite=CompositeWeights(
            straight=straight, curved=WeightTriple(w_progress=1.0, w_steer=0.5, w_velocity=0.3)))),
    ]


def curve_weighting_variants() -> List[AblationVariant]:
    """Unweighted steering penalty against the rational curvature weighting."""
    return [
        AblationVariant("unweighted", RewardConfig(steering=SteeringPenaltyParams(weighting=CurveWeighting.NONE))),
        AblationVariant("weighted", RewardConfig(steering=SteeringPenaltyParams(weighting=CurveWeighting.RATIONAL_FORM))),
    ]


VARIANT_SETS = {
    "progress": progress_variants,
    "steering": steering_weight_variants,
    "weighting": curve_weighting_variants,
}


STOP_AND_GO = {"position_noise": 0.005, "stop_period": 40, "stop_steps": 12, "stop_speed": 0.005}


def stop_and_go(params: SimParams) -> SimParams:
    """
    Copy of params with a noisy localization fix and periodic forced
    slow-downs to a crawl, the regime where the unregularized progress
    reward divides position noise by a near-zero distance.
    """
    return SimParams.model_validate({**params.model_dump(), **STOP_AND_GO})
