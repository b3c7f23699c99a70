"""Command line front end: one CSV in, one PNG out.

    gmm-plots --figure 1 --in mean.csv --out mean.png
    gmm-plots --figure 2 --in var.csv --out var.png --palette colorblind

Exit codes: 0 success, 1 usage error, 2 schema error (the CSV does not
match the figure), 3 when a file cannot be read or written.
"""
from __future__ import annotations

import argparse
import sys

import matplotlib.pyplot as plt

from .errors import SchemaError
from .figures import FIGURE_LAYOUTS, PALETTES, figure_spec, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCHEMA = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gmm-plots", description=__doc__.splitlines()[0])
    parser.add_argument("--figure", required=True, choices=sorted(FIGURE_LAYOUTS),
                        help="which figure kind to draw")
    parser.add_argument("--in", dest="csv_path", required=True, metavar="CSV",
                        help="input table written by gmm-lab simulate")
    parser.add_argument("--out", required=True, metavar="PNG",
                        help="output image path")
    parser.add_argument("--palette", default="default", choices=sorted(PALETTES),
                        help="color palette (default: %(default)s)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = figure_spec(args.figure, args.csv_path, args.out, palette=args.palette)
    try:
        figure = render(spec)
    except SchemaError as exc:
        print(f"gmm-plots: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"gmm-plots: {exc}", file=sys.stderr)
        return EXIT_IO
    plt.close(figure)
    print(f"wrote {args.out}")
    return EXIT_OK


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
