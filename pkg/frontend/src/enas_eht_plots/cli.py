"""plot-compare: render the 2x2 figure from theory and empirical sweep CSVs."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .figure import FigureSpec, SchemaError, render_comparison_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-compare",
        description="Render theoretical bounds and empirical means as a 4-panel SVG.",
    )
    parser.add_argument("--theory", required=True, help="bound-sweep CSV (schema v1)")
    parser.add_argument("--empirical", required=True, help="simulation-sweep CSV (schema v1)")
    parser.add_argument("--out", required=True, help="output SVG path")
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(theory_path=args.theory, empirical_path=args.empirical, out_path=args.out)
    try:
        warnings = render_comparison_figure(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 1 if warnings else 0


if __name__ == "__main__":
    sys.exit(main())
