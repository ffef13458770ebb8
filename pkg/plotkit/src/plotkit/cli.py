"""Command-line entry point: render panel-spec files to images."""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .panels import PANEL_KINDS, load_spec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figure panels from simulator CSV outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_plot = sub.add_parser(
        "plot", help="render every panel in a JSON panel-spec file"
    )
    p_plot.add_argument("spec")

    sub.add_parser("kinds", help="list available panel kinds")

    args = parser.parse_args(argv)

    if args.command == "kinds":
        for kind in PANEL_KINDS:
            print(kind)
        return 0

    try:
        panels = load_spec(args.spec)
        written = [render(panel) for panel in panels]
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
