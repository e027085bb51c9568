"""figures: regenerate the standard plots from engine CSV files.

    figures fig1 --csv single.csv double.csv full.csv blue.csv --out fig1.png
    figures fig2 --csv gainmap.csv --out fig2.png

``--dump-values`` prints every plotted value (17 significant digits, exactly
as parsed from the CSV) to standard output after rendering, so downstream
checks can verify the image was drawn from the file contents and nothing
else.  Exit codes: 0 ok, 2 for unreadable/unsuitable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .csvio import SchemaError, read_table
from .render import format_dump, render_fig1, render_fig2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Regenerate figures from triphoton sweep CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("fig1", help="criterion S vs seeding photon number")
    p1.add_argument("--csv", nargs="+", required=True,
                    help="one sweep CSV per curve")
    p1.add_argument("--out", required=True, help="output image path")
    p1.add_argument("--band", type=float, default=2.0,
                    help="upper edge of the shaded entanglement band")
    p1.add_argument("--dump-values", action="store_true")

    p2 = sub.add_parser("fig2", help="polar gain and variance panels")
    p2.add_argument("--csv", nargs=1, required=True, help="gain-map CSV")
    p2.add_argument("--out", required=True)
    p2.add_argument("--dump-values", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tables = [read_table(p) for p in args.csv]
        if args.command == "fig1":
            dumps = render_fig1(tables, args.out, band=args.band)
        else:
            dumps = render_fig2(tables[0], args.out)
        if not Path(args.out).exists() or Path(args.out).stat().st_size == 0:
            raise OSError(f"no image written to {args.out}")
    except (SchemaError, ValueError, OSError) as exc:
        print(f"figures error: {exc}", file=sys.stderr)
        return 2
    if args.dump_values:
        print(format_dump(dumps))
    return 0


if __name__ == "__main__":
    sys.exit(main())
