"""`report` command: benchmark CSVs and fitted games to figures."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, ReportError, ReportSpec, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="report",
        description="Render coalition-formation benchmark results into figures.")
    parser.add_argument("--csv", action="append", default=[],
                        help="benchmark CSV path (repeatable; quality/runtime kinds)")
    parser.add_argument("--isg", help="ISG JSON path (weight-hist kind)")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="figure to render")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--log-y", action="store_true", default=None,
                        help="force a logarithmic y axis (runtime defaults to log)")
    return parser


def dispatch(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = ReportSpec(kind=args.kind, out_path=args.out,
                          csv_paths=tuple(args.csv), isg_path=args.isg,
                          log_y=args.log_y)
        render(spec)
    except (ReportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.kind} figure to {args.out}")
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
