"""Command-line entry point.

holobeam run  --config scenario.toml [--sweep AXIS --values v1,v2,...]
              [--out DIR] [--jobs N] [--seed S]
holobeam cost --n-t N [--cost-ratio CR] [--unit-cost X]

Without --sweep, `run` executes the three schemes (optimized / random / no
RIS) on the configured scenario, which is the same as sweeping ris_mode over
all modes. Outputs: records.csv, summary.csv, manifest.txt in --out.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .config import load_config, replace
from .harness import (
    SCHEMES,
    SWEEP_AXES,
    CostModel,
    aggregate,
    hardware_cost,
    run_sweep,
    write_manifest,
    write_records,
    write_summary,
)

_VALUE_PARSERS = {
    "p_t_watts": float,
    "k_users": int,
    "n_ris": int,
    "n_t": int,
    "ris_mode": str,
    "csi_mode": str,
}


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("true", "1", "on", "yes"):
        return True
    if lowered in ("false", "0", "off", "no"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


def parse_values(axis, text):
    parser = _VALUE_PARSERS.get(axis, _parse_bool)
    return [parser(item.strip()) for item in text.split(",") if item.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="holobeam")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="seeded Monte-Carlo sweep")
    run.add_argument("--config", required=True, help="scenario file (flat TOML)")
    run.add_argument("--sweep", choices=SWEEP_AXES, help="scenario axis to sweep")
    run.add_argument("--values", help="comma-separated sweep values")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--jobs", type=int, default=1, help="parallel workers")
    run.add_argument("--seed", type=int, help="override the master seed")

    cost = sub.add_parser("cost", help="hardware cost comparison")
    cost.add_argument("--n-t", type=int, required=True, dest="n_t")
    cost.add_argument("--cost-ratio", type=float, default=10.0, dest="cost_ratio")
    cost.add_argument("--unit-cost", type=float, default=1.0, dest="unit_cost")
    return parser


def cmd_run(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.sweep is not None:
        if not args.values:
            raise ValueError("--sweep requires --values")
        axis = args.sweep
        values = parse_values(axis, args.values)
    else:
        axis = "ris_mode"
        values = list(SCHEMES)
    records = run_sweep(cfg, axis, values, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    write_records(records, os.path.join(args.out, "records.csv"))
    write_summary(aggregate(records), os.path.join(args.out, "summary.csv"))
    write_manifest(cfg, axis, values, os.path.join(args.out, "manifest.txt"), __version__)
    skipped = sum(1 for r in records if r.skipped)
    print(f"wrote {len(records)} records ({skipped} skipped) to {args.out}")
    return 0


def cmd_cost(args):
    cm = CostModel(n_t=args.n_t, cost_ratio=args.cost_ratio, unit_cost=args.unit_cost)
    rhs_cost, phased_cost = hardware_cost(cm)
    print(f"holographic_surface_cost {rhs_cost!r}")
    print(f"phased_array_cost {phased_cost!r}")
    print(f"radiation_efficiency_rhs {cm.radiation_efficiency_rhs!r}")
    print(f"radiation_efficiency_phased {cm.radiation_efficiency_phased!r}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_cost(args)
    except Exception as exc:  # CLI boundary: report and exit nonzero
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
