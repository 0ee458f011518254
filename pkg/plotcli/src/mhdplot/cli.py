"""Command-line interface: mhdplot field | timeseries | slice."""

from __future__ import annotations

import argparse
import sys

from .io import SnapshotTable
from .plots import plot_field, plot_slice, plot_timeseries


def _build_parser():
    parser = argparse.ArgumentParser(prog="mhdplot")
    sub = parser.add_subparsers(dest="command", required=True)

    field = sub.add_parser("field", help="heatmap of one snapshot quantity")
    field.add_argument("snapshot")
    field.add_argument("--quantity", default="rho")
    field.add_argument("--log", action="store_true", help="logarithmic color scale")
    field.add_argument("--out", required=True)

    series = sub.add_parser("timeseries", help="diagnostic curves of one or more runs")
    series.add_argument("diagnostics", nargs="+")
    series.add_argument("--labels", help="comma-separated, one per file")
    series.add_argument("--columns", default="mean_alpha,total_entropy")
    series.add_argument("--out", required=True)

    slc = sub.add_parser("slice", help="quantity along the node line nearest a coordinate")
    slc.add_argument("snapshot")
    slc.add_argument("--axis", choices=("x", "y"), required=True)
    slc.add_argument("--coord", type=float, required=True)
    slc.add_argument("--quantity", default="p")
    slc.add_argument("--reference", help="two-column CSV overlay")
    slc.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "field":
            out = plot_field(SnapshotTable.read(args.snapshot), args.quantity,
                             args.out, log_scale=args.log)
        elif args.command == "timeseries":
            labels = args.labels.split(",") if args.labels else None
            out = plot_timeseries(args.diagnostics, labels, args.out,
                                  columns=tuple(args.columns.split(",")))
        else:
            out = plot_slice(SnapshotTable.read(args.snapshot), args.axis, args.coord,
                             args.quantity, args.out, reference_path=args.reference)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
