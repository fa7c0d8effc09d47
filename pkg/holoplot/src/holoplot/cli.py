"""holobeam-plot --in <dir> --out <dir> [--figures all|pt|k|nris|nt|csi|coupling]

Reads summary.csv (or aggregates records.csv) from --in and writes one image
per requested figure family into --out. Never modifies its inputs.
"""

from __future__ import annotations

import argparse
import sys

from .data import load_results
from .figures import FIGURES, render_families


def build_parser():
    parser = argparse.ArgumentParser(prog="holobeam-plot")
    parser.add_argument("--in", dest="in_dir", required=True, help="sweep output directory")
    parser.add_argument("--out", dest="out_dir", required=True, help="figure directory")
    parser.add_argument(
        "--figures",
        default="all",
        help="comma-separated figure families or 'all' (pt, k, nris, nt, csi, coupling)",
    )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rows = load_results(args.in_dir)
        names = list(FIGURES) if args.figures == "all" else [
            n.strip() for n in args.figures.split(",") if n.strip()
        ]
        paths = render_families(rows, names, args.out_dir)
    except Exception as exc:  # CLI boundary: report and exit nonzero
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
