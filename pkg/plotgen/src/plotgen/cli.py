"""Command line: ``plotgen <kind> --in <csv> [--out <img>] [--dump-table]``.

At least one of ``--out`` (render) and ``--dump-table`` (print the exact
plotted numbers as CSV on stdout) must be requested.  Bad inputs exit 1
with a one-line message on stderr.
"""

import argparse
import sys

from plotgen import figures, tables


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotgen",
        description="Render benchmark CSVs as figures, or dump the exact "
                    "numbers a figure would draw.")
    parser.add_argument("kind", choices=figures.FIGURE_KINDS,
                        help="which figure to produce")
    parser.add_argument("--in", dest="in_path", required=True,
                        metavar="CSV",
                        help="results.csv (loss_vs_p) or predictions.csv "
                             "(prediction_curves)")
    parser.add_argument("--out", dest="out_path", default="", metavar="IMG",
                        help="image file to write (format from extension)")
    parser.add_argument("--dump-table", action="store_true",
                        help="print the plotted statistics as CSV on stdout")
    parser.add_argument("--data", dest="data_path", default="",
                        metavar="CSV",
                        help="optional dataset CSV; scatters its "
                             "observations behind prediction curves")
    parser.add_argument("--band", default="0.25,0.75", metavar="LO,HI",
                        help="band quantiles for loss_vs_p "
                             "(default: 0.25,0.75)")
    parser.add_argument("--title", default="", help="figure title")
    return parser


def _parse_band(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--band expects LO,HI, got {text!r}")
    return float(parts[0]), float(parts[1])


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not (args.out_path or args.dump_table):
            raise ValueError(
                "nothing to do: pass --out, --dump-table, or both")
        spec = figures.FigureSpec(
            kind=args.kind, in_path=args.in_path, out_path=args.out_path,
            data_path=args.data_path, band_quantiles=_parse_band(args.band),
            title=args.title)
        if spec.kind == "loss_vs_p":
            table = figures.plot_loss_vs_p(spec)
            columns = tables.LOSS_TABLE_COLUMNS
        else:
            table = figures.plot_prediction_curves(spec)
            columns = tables.GAP_TABLE_COLUMNS
    except Exception as exc:
        print(f"plotgen: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.dump_table:
        sys.stdout.write(tables.format_table(table, columns))
    if args.out_path:
        print(f"wrote {args.out_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
