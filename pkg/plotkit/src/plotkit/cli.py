"""Command line front end: render one figure from one or more CSVs.

Exit codes: 0 on success, 1 when the input is unreadable or fails the
schema check, 2 for usage errors (argparse's own convention).
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render simulator CSV output as a figure.",
    )
    parser.add_argument(
        "--in",
        dest="source",
        action="append",
        required=True,
        metavar="CSV",
        help="input CSV; repeat the flag to overlay several files",
    )
    parser.add_argument(
        "--out", required=True, metavar="IMAGE",
        help="output image path (format taken from the extension)",
    )
    parser.add_argument("--kind", required=True, choices=sorted(KINDS))
    parser.add_argument("--xlabel", help="x axis label override")
    parser.add_argument("--ylabel", help="y axis label override")
    parser.add_argument("--title", help="figure title")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = render(
            FigureSpec(
                source=tuple(args.source),
                kind=args.kind,
                output=args.out,
                xlabel=args.xlabel,
                ylabel=args.ylabel,
                title=args.title,
            )
        )
    except (OSError, ValueError) as err:
        print(f"plotkit: {err}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
