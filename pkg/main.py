#!/usr/bin/env python3
"""
Main entry point for trackforge.

Subcommands:
  config init [PATH]         write the default run config and its schema
  simulate --policy CKPT     run one seeded episode and write its trace
  train                      train a linear policy with the cross-entropy method
  experiment NAME            write one comparison table set or run an ablation
  track generate KIND PATH   write a synthetic track CSV

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from config import Config, RunConfig, dump_run_config, load_run_config, write_default_config
from experiments.ablation import VARIANT_SETS, run_ablation, stop_and_go
from experiments.figures import (
    compare_progress_rewards,
    compare_steering_penalties,
    compare_weighted_steering,
    scatter_velocity_reward,
    sweep_velocity_reward,
)
from experiments.generators import abrupt_steering_profile, block_curvature_profile, sinusoidal_progress_trace
from experiments.outputs import make_run_dir, write_manifest, write_table
from models.policy.cem import train_cem
from models.policy.evaluation import episode_metrics
from models.policy.linear import load_checkpoint, save_checkpoint
from models.track.generators import GENERATORS
from models.track.io import load_track, save_track
from models.vehicle.rollout import rollout

logger = logging.getLogger("trackforge")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="Run config JSON (defaults when omitted).")
    common.add_argument("--seed", type=int, default=None, help="Master seed; overrides the config's master_seed.")
    common.add_argument("--out", type=str, default=None, help="Output directory; overrides the config's output_dir.")
    common.add_argument("--track", type=str, default=None, help="Track CSV; overrides the config's track.")
    common.add_argument(
        "--run-id",
        type=str,
        default=None,
        help="Run folder name (default: UTC timestamp plus seed).",
    )
    common.add_argument(
        "--log-level",
        type=str,
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity.",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog=Config.PROJECT_NAME,
        description="Reward-shaping experiments for a small simulated racing car.",
    )
    parser.add_argument("--version", action="version", version=f"{Config.PROJECT_NAME} {Config.VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    config_cmd = commands.add_parser("config", help="Run configuration helpers.")
    config_actions = config_cmd.add_subparsers(dest="action", required=True)
    init = config_actions.add_parser("init", parents=[common], help="Write the default config and its schema.")
    init.add_argument("path", nargs="?", default=Config.DEFAULT_CONFIG_NAME, help="Config file to write.")

    simulate = commands.add_parser("simulate", parents=[common], help="Run one seeded episode.")
    simulate.add_argument("--policy", type=str, required=True, help="Policy checkpoint JSON.")

    commands.add_parser("train", parents=[common], help="Train a policy with the cross-entropy method.")

    experiment = commands.add_parser("experiment", parents=[common], help="Write a comparison table or run an ablation.")
    experiment.add_argument("name", choices=Config.EXPERIMENTS, help="Experiment to run.")

    track_cmd = commands.add_parser("track", help="Track helpers.")
    track_actions = track_cmd.add_subparsers(dest="action", required=True)
    generate = track_actions.add_parser("generate", parents=[common], help="Write a synthetic track CSV.")
    generate.add_argument("kind", choices=sorted(GENERATORS), help="Track generator.")
    generate.add_argument("path", type=str, help="CSV file to write.")
    return parser


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Config file plus command-line overrides; --seed becomes the only seed source."""
    run = load_run_config(args.config)
    updates = {}
    if args.track is not None:
        updates["track"] = args.track
    if args.out is not None:
        updates["output_dir"] = args.out
    seed = run.master_seed if args.seed is None else args.seed
    updates["master_seed"] = seed
    updates["train"] = run.train.model_copy(update={"master_seed": seed})
    return run.model_copy(update=updates)


def _load_track(run: RunConfig):
    return load_track(Config.resolve_path(run.track), half_width=run.half_width)


def cmd_config_init(args: argparse.Namespace) -> int:
    path, schema = write_default_config(args.path)
    print(f"Wrote {path}")
    print(f"Wrote {schema}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    run = resolve_run_config(args)
    track = _load_track(run)
    policy, _ = load_checkpoint(args.policy)

    trace = rollout(policy, track, run.reward, run.sim, run.master_seed)
    metrics = episode_metrics(trace, run.sim.dt)

    run_dir = make_run_dir(run.output_dir, run.master_seed, args.run_id)
    trace.to_csv(run_dir / "trace.csv")
    write_manifest(run_dir, "simulate", run.model_dump(mode="json"), run.master_seed, Config.VERSION,
                   ["trace.csv"], extra={"policy": str(args.policy)})

    lap_time = f"{metrics.lap_time:.3f} s" if metrics.lap_time is not None else "n/a"
    print(f"Termination: {metrics.termination}")
    print(f"Steps: {metrics.steps}  Lap time: {lap_time}")
    print(f"Mean speed: {metrics.mean_speed:.4f} m/s  Smoothness: {metrics.smoothness:.4f} deg/step")
    print(f"Return: {metrics.total_return:.4f}")
    print(f"Trace: {run_dir / 'trace.csv'}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    run = resolve_run_config(args)
    track = _load_track(run)

    result = train_cem(track, run.reward, run.sim, run.train)

    run_dir = make_run_dir(run.output_dir, run.master_seed, args.run_id)
    save_checkpoint(result.best_policy, run_dir / "checkpoint.json", run.master_seed)
    write_table(result.stats_frame(), run_dir / "train_stats.csv")
    write_manifest(run_dir, "train", run.model_dump(mode="json"), run.master_seed, Config.VERSION,
                   ["checkpoint.json", "train_stats.csv"],
                   extra={"total_episodes": result.total_episodes})

    print(f"Iterations: {len(result.history)}  Episodes: {result.total_episodes}")
    print(f"Best return: {result.best_return:.4f}")
    print(f"Checkpoint: {run_dir / 'checkpoint.json'}")
    return 0


def run_experiment(name: str, run: RunConfig, run_dir: Path) -> List[str]:
    """Write the tables of one experiment into run_dir and return their file names."""
    exp = run.experiments
    seed = run.master_seed

    if name == "velocity-sweep":
        grid = np.round(np.arange(int(round(exp.error_max / exp.error_step)) + 1) * exp.error_step, 10)
        write_table(sweep_velocity_reward(exp.alphas, grid), run_dir / "velocity_sweep.csv")
        return ["velocity_sweep.csv"]

    if name == "velocity-scatter":
        write_table(scatter_velocity_reward(exp.scatter_alpha, exp.scatter_n, seed), run_dir / "velocity_scatter.csv")
        return ["velocity_scatter.csv"]

    if name == "progress-compare":
        trace = sinusoidal_progress_trace(
            n_steps=exp.progress_steps,
            period=exp.progress_period,
            dl_min=exp.progress_dl_min,
            dprogress=exp.progress_dprogress,
            seed=seed,
        )
        write_table(compare_progress_rewards(trace, exp.progress_epsilon), run_dir / "progress_compare.csv")
        return ["progress_compare.csv"]

    if name == "steering-compare":
        table, summary = compare_steering_penalties(exp.steering_k, exp.steering_steps, seed)
        write_table(table, run_dir / "steering_compare.csv")
        write_table(summary, run_dir / "steering_compare_summary.csv")
        return ["steering_compare.csv", "steering_compare_summary.csv"]

    if name == "steering-weighted":
        curvature = block_curvature_profile(exp.steering_steps, exp.curvature_block, exp.arc_curvature)
        steering = abrupt_steering_profile(exp.steering_steps, seed)
        table = compare_weighted_steering(exp.steering_k, exp.weighted_gamma, curvature, steering)
        write_table(table, run_dir / "steering_weighted.csv")
        return ["steering_weighted.csv"]

    if name == "ablation":
        make_variants = VARIANT_SETS.get(exp.ablation_variants)
        if make_variants is None:
            raise ValueError(
                f"experiments.ablation_variants: unknown set {exp.ablation_variants!r} "
                f"(expected one of {', '.join(sorted(VARIANT_SETS))})"
            )
        result = run_ablation(
            _load_track(run),
            make_variants(),
            run.train,
            stop_and_go(run.sim) if exp.stop_and_go else run.sim,
            eval_seeds=[seed + s for s in exp.eval_seeds],
            train_seeds=[seed + s for s in exp.train_seeds],
            trace_dir=run_dir / "traces",
            spike_factor=exp.spike_factor,
        )
        write_table(result.summary_frame(), run_dir / "ablation_summary.csv")
        write_table(result.report, run_dir / "ablation_report.csv")
        for row in result.report.itertuples(index=False):
            effect = "" if math.isnan(row.effect_size) else f" (effect size {row.effect_size:+.2f})"
            print(f"{row.variant} vs {row.baseline}: {row.metric} {row.direction}{effect}")
        return ["ablation_summary.csv", "ablation_report.csv"] + [f"traces/{n}" for n in sorted(result.traces)]

    raise ValueError(f"unknown experiment {name!r}")


def cmd_experiment(args: argparse.Namespace) -> int:
    run = resolve_run_config(args)
    run_dir = make_run_dir(run.output_dir, run.master_seed, args.run_id)
    artifacts = run_experiment(args.name, run, run_dir)
    write_manifest(run_dir, f"experiment {args.name}", run.model_dump(mode="json"), run.master_seed,
                   Config.VERSION, artifacts)
    for artifact in artifacts[:6]:
        print(f"Wrote {run_dir / artifact}")
    if len(artifacts) > 6:
        print(f"... and {len(artifacts) - 6} more")
    return 0


def cmd_track_generate(args: argparse.Namespace) -> int:
    run = load_run_config(args.config)
    track = GENERATORS[args.kind](half_width=run.half_width)
    path = save_track(track, args.path, comment=f"{args.kind} track generated by {Config.PROJECT_NAME}")
    print(f"Wrote {path} ({len(track)} waypoints, {track.total_length:.3f} m)")
    return 0


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "config":
        return cmd_config_init(args)
    if args.command == "simulate":
        return cmd_simulate(args)
    if args.command == "train":
        return cmd_train(args)
    if args.command == "experiment":
        return cmd_experiment(args)
    return cmd_track_generate(args)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=getattr(logging, args.log_level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return dispatch(args)
    except (ValueError, OSError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
