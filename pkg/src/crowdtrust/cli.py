"""Command-line interface.

Subcommands:
  simulate   run one scenario, write qos_series.csv (plus reputation
             snapshots and the detection table for the trust scheme)
  sweep      run the scheme x malicious-fraction grid, write sweep.csv
  exp-curve  write the scripted experience trajectories as CSV
  detect     run a trust-based scenario and write the detection table

Precedence for settings: --set overrides > config file > defaults. All
randomness flows from the single ``seed`` key. Exit codes: 0 success,
1 usage or configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from dataclasses import replace

from .config import ConfigError, build_config, parse_config_file, parse_overrides
from .experience import scripted_curves
from .qos import DegenerateQoSError
from .reputation import NonConvergenceError
from .simulator import (SWEEP_CHECKPOINTS, SWEEP_FRACTIONS, run_simulation,
                        run_sweep, write_decisions, write_detection,
                        write_qos_series, write_snapshot, write_sweep)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors share the config exit code
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _build_parser() -> _Parser:
    parser = _Parser(prog="crowdtrust",
                     description="Trust-driven crowd-sensing recruitment simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, default=None,
                       help="key=value config file (all keys optional)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override one config key; beats the config file")
        p.add_argument("--seed", type=int, default=None,
                       help="shorthand for --set seed=N")
        p.add_argument("--out", type=Path, default=Path("."),
                       help="output directory (created if missing)")

    sim = sub.add_parser("simulate", help="run one scenario and write CSVs")
    add_common(sim)

    sweep = sub.add_parser("sweep", help="run the scheme/malicious-fraction grid")
    add_common(sweep)
    sweep.add_argument("--fractions", default=",".join(str(f) for f in SWEEP_FRACTIONS),
                       help="comma-separated malicious fractions")
    sweep.add_argument("--checkpoints", default=",".join(str(c) for c in SWEEP_CHECKPOINTS),
                       help="comma-separated request checkpoints")
    sweep.add_argument("--replicates", type=int, default=1,
                       help="seeds per grid cell")
    sweep.add_argument("--jobs", type=int, default=1,
                       help="parallel worker processes")

    curve = sub.add_parser("exp-curve", help="write scripted experience curves")
    add_common(curve)

    detect = sub.add_parser("detect", help="trust-based run, detection table only")
    add_common(detect)
    return parser


def _load_config(args, force_scheme: str | None = None):
    file_values = parse_config_file(args.config) if args.config else {}
    overrides = parse_overrides(args.overrides)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if force_scheme:
        overrides["scheme"] = force_scheme
    return build_config(file_values, overrides)


def _ensure_out(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _cmd_simulate(args) -> int:
    config = _load_config(args)
    out = _ensure_out(args)
    report = run_simulation(config)
    write_qos_series(out / "qos_series.csv", report)
    for index, rep in report.snapshots:
        write_snapshot(out / f"reputation_snapshot_{index}.csv",
                       report.population, rep)
    if report.detection is not None:
        write_detection(out / "detection_table.csv", report.detection)
    if report.decisions is not None:
        write_decisions(out / "decisions.csv", report)
    it_pos, it_neg = report.max_rep_iterations()
    print(f"scheme={config.scheme} seed={config.seed} requests={config.n_requests} "
          f"cumulative_qos={report.cumulative_qos:.6f} "
          f"rep_iterations_max=({it_pos},{it_neg})")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    out = _ensure_out(args)
    try:
        fractions = [float(f) for f in args.fractions.split(",") if f.strip()]
        checkpoints = [int(c) for c in args.checkpoints.split(",") if c.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad sweep grid: {exc}") from exc
    try:
        cells = run_sweep(config, malicious_fractions=fractions,
                          checkpoints=checkpoints, replicates=args.replicates,
                          jobs=args.jobs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_sweep(out / "sweep.csv", cells)
    print(f"sweep: {len(cells)} cells "
          f"({len(fractions)} fractions x {len(checkpoints)} checkpoints x 4 schemes), "
          f"replicates={args.replicates}")
    return EXIT_OK


def _cmd_exp_curve(args) -> int:
    config = _load_config(args)
    out = _ensure_out(args)
    curves = scripted_curves(config.experience)
    lines = ["step,value,regime"]
    for regime, values in curves.items():
        for step, value in enumerate(values):
            lines.append(f"{step},{value:.12g},{regime}")
    path = out / "exp_curve.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({sum(len(v) for v in curves.values())} rows)")
    return EXIT_OK


def _cmd_detect(args) -> int:
    config = _load_config(args, force_scheme="trust")
    out = _ensure_out(args)
    report = run_simulation(config)
    if report.detection is None:
        raise ConfigError("detection needs at least one request")
    write_detection(out / "detection_table.csv", report.detection)
    for row in report.detection:
        print(f"lowest {row.size:4d} users ({row.fraction:.1%}): "
              f"{row.n_malicious} malicious, {row.n_low} low, {row.n_high} high")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "exp-curve": _cmd_exp_curve,
    "detect": _cmd_detect,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergenceError, DegenerateQoSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
