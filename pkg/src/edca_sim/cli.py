"""Command line front end.

Subcommands:
  run      simulate one mode/seed and write a run directory
  sweep    run several modes and seeds under one output root
  audit    re-verify run directories from their files alone
  compare  per-category latency/throughput deltas between two runs

The output root defaults to $EDCA_SIM_OUT, then ./runs. Exit status is 0 on
success, 1 when an audit finds violations or a config is invalid, 2 for bad
command line arguments.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core import (ConfigError, MODES, SimConfig, load_config, require_valid,
                   scaled_config, __version__)
from .orchestrator import (ControllerMode, audit_run, compare_runs,
                           run_experiment)

_OVERRIDE_ATTRS = (
    ("seed", "rng_seed"),
    ("episodes", "episodes"),
    ("duration", "episode_duration"),
    ("arrival_interval", "arrival_interval"),
    ("road_length", "road_length"),
    ("rsu_position", "rsu_position"),
    ("coverage_radius", "coverage_radius"),
    ("max_speed", "max_speed"),
    ("epsilon", "epsilon"),
    ("learning_rate", "learning_rate"),
    ("discount", "discount"),
    ("series_bucket", "series_bucket"),
)


def _out_root(args) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(os.environ.get("EDCA_SIM_OUT", "runs"))


def _build_config(args, mode: str) -> SimConfig:
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = scaled_config(args.traffic_scale)
    config.mode = mode
    for flag, attr in _OVERRIDE_ATTRS:
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, attr, value)
    return require_valid(config)


def _print_summary(summary, file=sys.stdout) -> None:
    print(f"  {'cat':>3} {'generated':>9} {'delivered':>9} {'dropped':>7} "
          f"{'residual':>8} {'mean_lat':>10} {'p95_lat':>10} {'thrpt':>12}",
          file=file)
    for cat, row in summary.items():
        lat = f"{row.mean_latency:.6f}" if row.mean_latency is not None else "-"
        p95 = f"{row.p95_latency:.6f}" if row.p95_latency is not None else "-"
        print(f"  {cat.short:>3} {row.generated:>9} {row.delivered:>9} "
              f"{row.dropped:>7} {row.residual:>8} {lat:>10} {p95:>10} "
              f"{row.mean_throughput:>12.1f}", file=file)


def _cmd_run(args) -> int:
    try:
        config = _build_config(args, args.mode)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = _out_root(args)
    run_dir = out / (args.label or f"{args.mode}_seed{config.rng_seed}")
    result = run_experiment(config, run_dir,
                            eval_episodes=args.eval_episodes,
                            write_packets=not args.no_packets,
                            command=" ".join(args.argv))
    if not args.quiet:
        print(f"run complete: {result.out_dir}")
        _print_summary(result.summary)
    return 0


def _cmd_sweep(args) -> int:
    out = _out_root(args)
    rc = 0
    for mode in args.modes:
        for seed in args.seeds:
            args.seed = seed
            try:
                config = _build_config(args, mode)
            except (ConfigError, FileNotFoundError) as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 1
            run_dir = out / f"{mode}_seed{seed}"
            result = run_experiment(config, run_dir,
                                    eval_episodes=args.eval_episodes,
                                    write_packets=not args.no_packets,
                                    command=" ".join(args.argv))
            if not args.quiet:
                label = ControllerMode.from_id(mode).label
                print(f"{label} seed {seed}: {result.out_dir}")
                _print_summary(result.summary)
    return rc


def _cmd_audit(args) -> int:
    bad = 0
    for run_dir in args.run_dirs:
        report = audit_run(run_dir)
        if report.ok:
            print(f"{run_dir}: OK ({report.packets_checked} packets, "
                  f"{report.decisions_checked} decisions, "
                  f"{report.episodes_checked} episodes)")
        else:
            bad += 1
            print(f"{run_dir}: {len(report.violations)} violation(s)")
            for v in report.violations:
                print(f"  {v}")
    return 1 if bad else 0


def _cmd_compare(args) -> int:
    rows = compare_runs(args.base, args.candidate)
    print(f"{'cat':>3} {'base_lat':>10} {'cand_lat':>10} {'lat_gain%':>10} "
          f"{'base_thr':>12} {'cand_thr':>12} {'thr_gain%':>10}")
    for r in rows:
        def fmt(x, spec):
            return format(x, spec) if x is not None else "-"
        print(f"{r['category']:>3} {fmt(r['base_latency'], '.6f'):>10} "
              f"{fmt(r['cand_latency'], '.6f'):>10} "
              f"{fmt(r['latency_gain_pct'], '+.2f'):>10} "
              f"{fmt(r['base_throughput'], '.1f'):>12} "
              f"{fmt(r['cand_throughput'], '.1f'):>12} "
              f"{fmt(r['throughput_gain_pct'], '+.2f'):>10}")
    return 0


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; profile values come from it")
    p.add_argument("--traffic-scale", type=float, default=1.0,
                   help="scale all profile rates when no config file is given")
    p.add_argument("--episodes", type=int, help="training episodes")
    p.add_argument("--eval-episodes", type=int, default=0,
                   help="greedy evaluation episodes appended after training")
    p.add_argument("--duration", type=float, help="episode length, seconds")
    p.add_argument("--arrival-interval", type=float, help="seconds between vehicle arrivals")
    p.add_argument("--road-length", type=float, help="meters")
    p.add_argument("--rsu-position", type=float, help="meters from road start")
    p.add_argument("--coverage-radius", type=float, help="meters")
    p.add_argument("--max-speed", type=float, help="meters per second")
    p.add_argument("--epsilon", type=float, help="exploration rate")
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--discount", type=float)
    p.add_argument("--series-bucket", type=float, help="series/CDF bucket width, seconds")
    p.add_argument("--out", help="output root (default $EDCA_SIM_OUT or ./runs)")
    p.add_argument("--no-packets", action="store_true",
                   help="skip per-episode packet CSVs")
    p.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edca-sim",
        description="vehicular multi-service channel simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one mode and seed")
    p_run.add_argument("--mode", choices=MODES, default="three-agent")
    p_run.add_argument("--seed", type=int, help="run seed")
    p_run.add_argument("--label", help="run directory name (default <mode>_seed<seed>)")
    _add_run_options(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run several modes and seeds")
    p_sweep.add_argument("--modes", nargs="+", choices=MODES, default=list(MODES))
    p_sweep.add_argument("--seeds", nargs="+", type=int, default=[1])
    _add_run_options(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_audit = sub.add_parser("audit", help="re-verify run directories")
    p_audit.add_argument("run_dirs", nargs="+")
    p_audit.set_defaults(func=_cmd_audit)

    p_cmp = sub.add_parser("compare", help="compare two run directories")
    p_cmp.add_argument("base")
    p_cmp.add_argument("candidate")
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
