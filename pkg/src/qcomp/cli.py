"""Command-line front end: ``qcomp sweep``.

Exit codes: 0 on success, 1 for configuration errors, 2 for runtime failures.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from .harness import ExperimentConfig, SweepError, emit, format_rows, run_sweep
from .signal_model import RadarConfig

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _names(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sweep = sub.add_parser("sweep", help="run a Monte-Carlo sweep and write a results table")
    sweep.add_argument("--config", help="JSON file with ExperimentConfig fields")
    sweep.add_argument("--k", type=int, dest="k_targets", help="number of targets K")
    sweep.add_argument("--m", type=int, dest="m_samples", help="number of samples M")
    sweep.add_argument("--trials", type=int)
    sweep.add_argument("--densities", type=_floats, help="comma-separated N/M values")
    sweep.add_argument("--schemes", type=_names, help="subset of none,taylor1,taylor2")
    sweep.add_argument("--channels", type=_names, help="subset of full,onebit,onebit_dither")
    sweep.add_argument("--seed", type=int, dest="master_seed")
    sweep.add_argument("--out", dest="output", help="output path (stdout if omitted)")
    sweep.add_argument("--format", choices=("csv", "json"))
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--physical", type=_floats, metavar="F0,TS",
                       help="carrier frequency (Hz) and sampling period (s); default is a unit span")
    sweep.add_argument("--timing", dest="record_timing", action="store_true", default=None,
                       help="record wall time per cell (output is then not byte-reproducible)")
    sweep.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args) -> ExperimentConfig:
    base = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            base = json.load(fh)
        if not isinstance(base, dict):
            raise ValueError("config file must hold a JSON object")
    cfg = ExperimentConfig.from_dict(base)
    overrides = {
        name: getattr(args, name)
        for name in ("k_targets", "trials", "densities", "schemes", "channels",
                     "master_seed", "output", "format", "workers", "record_timing")
        if getattr(args, name) is not None
    }
    radar = cfg.radar
    if args.physical is not None:
        if len(args.physical) != 2:
            raise ValueError("--physical expects F0,TS")
        radar = RadarConfig(f0=args.physical[0], ts=args.physical[1], m_samples=radar.m_samples)
    if args.m_samples is not None:
        radar = dataclasses.replace(radar, m_samples=args.m_samples)
    overrides["radar"] = radar
    return dataclasses.replace(cfg, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
    except (OSError, ValueError, TypeError) as exc:
        print(f"qcomp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        rows = run_sweep(cfg)
    except SweepError as exc:
        print(f"qcomp: {exc}", file=sys.stderr)
        if exc.rows and cfg.output:
            emit(exc.rows, cfg.output, cfg.format)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"qcomp: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    try:
        if cfg.output:
            emit(rows, cfg.output, cfg.format)
        else:
            sys.stdout.write(format_rows(rows, cfg.format))
    except OSError as exc:
        print(f"qcomp: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
