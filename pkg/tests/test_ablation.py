"""
Tests for reward-variant ablations and their summary statistics.
"""

import math

import numpy as np
import pytest

import experiments.ablation as ablation
from experiments.ablation import (
    AblationSummary,
    AblationVariant,
    VARIANT_SETS,
    curve_weighting_variants,
    directional_report,
    progress_variants,
    run_ablation,
    spike_fraction,
    stop_and_go,
    summarize_traces,
    trace_filename,
    variant_means,
)
from experiments.figures import compare_progress_rewards
from experiments.generators import sinusoidal_progress_trace
from models.policy.cem import TrainConfig
from models.rewards import ProgressMode, RewardConfig
from models.vehicle.dynamics import SimParams
from models.vehicle.rollout import EpisodeTrace, rollout
from tests.utils import CenterlineFollower, ConstantPolicy


def summary(variant, seed, **stats):
    return AblationSummary(variant, seed, "ok", **stats)


class TestSpikeFraction:

    def test_empty(self):
        assert spike_fraction([]) == 0.0

    def test_single_spike(self):
        values = [1.0] * 9 + [-50.0]
        assert spike_fraction(values) == 0.1

    def test_threshold_is_strict(self):
        assert spike_fraction([1.0, 1.0, 10.0]) == 0.0

    def test_raw_progress_spikes_more_than_regularized(self):
        table = compare_progress_rewards(sinusoidal_progress_trace(), epsilon=0.01)
        raw = spike_fraction(table["r_raw"].dropna())
        regularized = spike_fraction(table["r_regularized"])
        assert raw > regularized
        assert regularized == 0.0


class TestSummarizeTraces:
    """Test suite for pooled evaluation statistics."""

    def setup_method(self):
        self.params = SimParams()

    def test_completed_lap(self, oval, reward_config):
        trace = rollout(CenterlineFollower(), oval, reward_config, self.params, seed=0)
        stats = summarize_traces([trace], self.params.dt)
        assert stats["completion_rate"] == 1.0
        assert stats["mean_lap_time"] == len(trace) * self.params.dt
        assert stats["mean_speed"] == pytest.approx(trace.column("speed").mean())
        assert stats["episodes"] == 1

    def test_no_completed_lap(self, oval, reward_config):
        trace = rollout(ConstantPolicy(1.0, 30.0), oval, reward_config, self.params, seed=0)
        stats = summarize_traces([trace], self.params.dt)
        assert stats["completion_rate"] == 0.0
        assert math.isnan(stats["mean_lap_time"])

    def test_pools_steps_across_traces(self, oval, reward_config):
        first = rollout(CenterlineFollower(), oval, reward_config, self.params, seed=0)
        second = rollout(ConstantPolicy(0.5, 10.0), oval, reward_config, self.params, seed=0)
        stats = summarize_traces([first, second], self.params.dt)
        pooled = np.concatenate([first.column("dsteer"), second.column("dsteer")])
        assert stats["smoothness"] == np.mean(np.abs(pooled))
        assert stats["completion_rate"] == 0.5

    def test_empty_trace_list(self):
        with pytest.raises(ValueError):
            summarize_traces([], 0.0667)


class TestDirectionalReport:
    """Test suite for the variant-against-baseline report."""

    def test_direction_and_effect_size(self):
        summaries = [
            summary("base", 0, smoothness=2.0),
            summary("base", 1, smoothness=4.0),
            summary("penalized", 0, smoothness=1.0),
            summary("penalized", 1, smoothness=3.0),
        ]
        report = directional_report(summaries, metrics=("smoothness",))
        row = report.iloc[0]
        assert (row["variant"], row["baseline"], row["metric"]) == ("penalized", "base", "smoothness")
        assert row["difference"] == -1.0
        assert row["direction"] == "lower"
        assert row["effect_size"] == pytest.approx(-1.0 / math.sqrt(2.0))

    def test_single_seed_has_no_effect_size(self):
        report = directional_report([summary("a", 0, smoothness=1.0), summary("b", 0, smoothness=1.0)],
                                    metrics=("smoothness",))
        assert report["direction"].iloc[0] == "equal"
        assert math.isnan(report["effect_size"].iloc[0])

    def test_failed_runs_are_left_out(self):
        summaries = [
            summary("a", 0, completion_rate=1.0),
            AblationSummary("b", 0, "failed", error="diverged"),
        ]
        report = directional_report(summaries, metrics=("completion_rate",))
        assert report["direction"].iloc[0] == "n/a"

    def test_nan_lap_time_is_ignored(self):
        summaries = [summary("a", 0, mean_lap_time=10.0), summary("a", 1),
                     summary("b", 0, mean_lap_time=8.0)]
        report = directional_report(summaries, metrics=("mean_lap_time",))
        assert report["baseline_mean"].iloc[0] == 10.0
        assert report["direction"].iloc[0] == "lower"


class TestRunAblation:
    """Test suite for small end-to-end ablations."""

    def setup_method(self):
        self.params = SimParams(max_steps=100)
        self.train_config = TrainConfig(population_size=4, iterations=1, episodes_per_candidate=1)
        self.eval_seeds = [1000, 1001]

    def test_identical_variants_give_identical_summaries(self, oval):
        variants = [AblationVariant("a", RewardConfig()), AblationVariant("b", RewardConfig())]
        result = run_ablation(oval, variants, self.train_config, self.params, self.eval_seeds)
        first, second = result.summaries
        assert first.ok and second.ok
        assert {**vars(first), "variant": ""} == {**vars(second), "variant": ""}
        assert set(result.report["direction"]) <= {"equal", "n/a"}

    def test_recomputed_from_persisted_traces(self, oval, tmp_path):
        result = run_ablation(oval, progress_variants(), self.train_config, self.params,
                              self.eval_seeds, train_seeds=[0, 1], trace_dir=tmp_path)
        assert len(result.summaries) == 4
        assert len(list(tmp_path.glob("*.csv"))) == 4 * len(self.eval_seeds)

        for s in result.summaries:
            traces = [EpisodeTrace.from_csv(tmp_path / trace_filename(s.variant, s.train_seed, e))
                      for e in self.eval_seeds]
            stats = summarize_traces(traces, self.params.dt)
            for key, value in stats.items():
                expected = getattr(s, key)
                if isinstance(value, float) and math.isnan(value):
                    assert math.isnan(expected)
                else:
                    assert value == pytest.approx(expected, rel=0, abs=1e-12)

    def test_regularized_progress_respects_bound(self, oval):
        variants = progress_variants()
        epsilon = variants[1].reward.progress.epsilon
        result = run_ablation(oval, variants, self.train_config, self.params, self.eval_seeds)
        for name, trace in result.traces.items():
            if name.startswith("fixed_epsilon"):
                assert np.all(np.abs(trace.column("r_progress")) <= np.abs(trace.column("dprogress")) / epsilon)

    def test_failure_is_recorded(self, oval, monkeypatch):
        original = ablation.train_cem

        def flaky_train(track, reward_config, params, config, workers=None):
            if reward_config.progress.mode is ProgressMode.UNREGULARIZED:
                raise ValueError("diverged")
            return original(track, reward_config, params, config, workers=workers)

        monkeypatch.setattr(ablation, "train_cem", flaky_train)
        result = run_ablation(oval, progress_variants(), self.train_config, self.params, self.eval_seeds)
        failed, ok = result.summaries
        assert failed.status == "failed"
        assert failed.error == "diverged"
        assert ok.ok
        assert len(result.traces) == len(self.eval_seeds)

    def test_summary_frame(self, oval):
        result = run_ablation(oval, progress_variants(), self.train_config, self.params, self.eval_seeds)
        frame = result.summary_frame()
        assert list(frame["variant"]) == ["unregularized", "fixed_epsilon"] * 2
        assert list(frame["status"]) == ["ok", "ok", "mean", "mean"]
        assert list(frame["train_seed"].iloc[:2]) == [0, 0]
        assert frame["train_seed"].iloc[2:].isna().all()
        assert frame["completion_rate"].between(0.0, 1.0).all()
        assert frame["spike_fraction"].between(0.0, 1.0).all()
        per_seed, means = frame.iloc[:2].reset_index(drop=True), frame.iloc[2:].reset_index(drop=True)
        assert means["smoothness"].equals(per_seed["smoothness"])

    def test_needs_two_variants(self, oval):
        with pytest.raises(ValueError):
            run_ablation(oval, progress_variants()[:1], self.train_config, self.params, self.eval_seeds)

    def test_unique_names(self, oval):
        variants = [AblationVariant("a", RewardConfig()), AblationVariant("a", RewardConfig())]
        with pytest.raises(ValueError, match="unique"):
            run_ablation(oval, variants, self.train_config, self.params, self.eval_seeds)

    def test_needs_eval_seeds(self, oval):
        with pytest.raises(ValueError):
            run_ablation(oval, progress_variants(), self.train_config, self.params, [])


def test_variant_sets_have_a_baseline_and_a_contrast():
    for name, factory in VARIANT_SETS.items():
        variants = factory()
        assert len(variants) == 2, name
        assert variants[0].reward != variants[1].reward




class TestVariantMeans:
    """Test suite for the per-variant rows of the summary."""

    def test_means_over_successful_seeds(self):
        rows = variant_means([
            summary("a", 0, smoothness=1.0, episodes=5),
            summary("a", 1, smoothness=3.0, episodes=5),
            AblationSummary("a", 2, "failed", error="diverged"),
            summary("b", 0, smoothness=2.0, episodes=5),
        ])
        assert [r["variant"] for r in rows] == ["a", "b"]
        assert rows[0]["smoothness"] == 2.0
        assert rows[0]["episodes"] == 10
        assert rows[0]["error"] == "1 failed"
        assert rows[1]["error"] == ""

    def test_lap_time_skips_nan_seeds(self):
        rows = variant_means([summary("a", 0, mean_lap_time=12.0), summary("a", 1)])
        assert rows[0]["mean_lap_time"] == 12.0

    def test_all_failed_gives_nan(self):
        rows = variant_means([AblationSummary("a", 0, "failed", error="diverged")])
        assert math.isnan(rows[0]["completion_rate"])
        assert rows[0]["episodes"] == 0


def test_stop_and_go_keeps_other_params():
    params = stop_and_go(SimParams(max_steps=300, dt=0.05))
    assert (params.max_steps, params.dt) == (300, 0.05)
    assert params.position_noise > 0
    assert params.stopping(0) and not params.stopping(params.stop_steps)


def load_variant_traces(trace_dir, variant):
    return [EpisodeTrace.from_csv(p) for p in sorted(trace_dir.glob(f"{variant}_train*.csv"))]


@pytest.mark.slow
def test_progress_ablation_under_stop_and_go(bundled_slow_corner, tmp_path):
    params = stop_and_go(SimParams())
    result = run_ablation(bundled_slow_corner, progress_variants(), TrainConfig(population_size=16, iterations=10),
                          params, range(1000, 1005), train_seeds=[0, 1], trace_dir=tmp_path)
    assert all(s.ok for s in result.summaries)

    spikes = {}
    for variant in ("unregularized", "fixed_epsilon"):
        traces = load_variant_traces(tmp_path, variant)
        assert len(traces) == 10
        spikes[variant] = summarize_traces(traces, params.dt)["spike_fraction"]
    assert spikes["unregularized"] > spikes["fixed_epsilon"]


@pytest.mark.slow
def test_curve_weighting_ablation_has_smoothness_effect_size(bundled_oval):
    result = run_ablation(bundled_oval, curve_weighting_variants(), TrainConfig(population_size=16, iterations=10),
                          SimParams(), range(1000, 1005), train_seeds=range(5))
    assert all(s.ok for s in result.summaries)
    row = result.report[result.report["metric"] == "smoothness"].iloc[0]
    assert row["direction"] in {"higher", "lower"}
    assert math.isfinite(row["effect_size"])
