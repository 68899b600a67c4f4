"""Command line entry point: one panel per invocation."""

import argparse
import sys

from .panels import RENDERERS, render
from .schemas import SchemaError

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="render",
        description="Render a figure panel from a simulation output CSV.")
    p.add_argument("--kind", required=True, choices=sorted(RENDERERS))
    p.add_argument("--in", dest="in_path", required=True,
                   help="input CSV path")
    p.add_argument("--out", dest="out_path", required=True,
                   help="output image path")
    p.add_argument("--dpi", type=int, default=150)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        render(args.kind, args.in_path, args.out_path, dpi=args.dpi)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FileNotFoundError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def entry() -> None:
    raise SystemExit(main())
