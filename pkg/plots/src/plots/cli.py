"""`plots` command line: render one figure per invocation.

    plots render --kind adoption_scatter --in adoption_by_country.csv \\
        --out adoption.png [--top 20]

Exit codes: 0 rendered (including an empty-axes figure for a data-free
CSV), 1 runtime failure (unreadable input, header mismatch — the message
names the missing columns), 2 bad invocation (unknown kind or flag).
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, FigureSpecError, HeaderMismatchError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render one figure from a CSV")
    p_render.add_argument("--kind", required=True, choices=sorted(KINDS),
                          help="figure kind; fixes the expected CSV columns")
    p_render.add_argument("--in", dest="input_csv", required=True, metavar="CSV",
                          help="input CSV path")
    p_render.add_argument("--out", dest="output_image", required=True, metavar="IMG",
                          help="output image path; a vector/raster companion "
                               "is written next to it")
    p_render.add_argument("--top", type=int, default=None, metavar="N",
                          help="keep only the N heaviest groups")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            input_csv=args.input_csv,
            output_image=args.output_image,
            top=args.top,
        )
    except FigureSpecError as exc:
        print(f"plots: {exc}", file=sys.stderr)
        return 2
    try:
        result = render(spec)
    except HeaderMismatchError as exc:
        print(f"plots: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"plots: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {' and '.join(result.paths)} ({result.rows} rows)")
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
