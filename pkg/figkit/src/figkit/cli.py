"""Command-line entry point: figkit <kind> --in PATH [...] --out PATH.png

Kinds and their inputs, in --in order:

  fig2  channel dump (dump-channel export)
  fig4  hardening.csv
  fig6  trials.csv fits.json
  fig8  regression.json
  fig9  ser.csv

Exit codes: 0 ok, 2 schema/usage error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .render import render_fig2, render_fig4, render_fig6, render_fig8, render_fig9
from .schemas import (
    HARDENING_COLUMNS,
    SER_COLUMNS,
    TRIALS_COLUMNS,
    SchemaError,
    load_channel_dump,
    load_csv,
    load_fits,
    load_regression,
)

KINDS = ("fig2", "fig4", "fig6", "fig8", "fig9")
_N_INPUTS = {"fig2": 1, "fig4": 1, "fig6": 2, "fig8": 1, "fig9": 1}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="figkit",
                                description="render figures from elaasim result bundles")
    p.add_argument("--version", action="version", version=f"figkit {__version__}")
    sub = p.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"render a {kind}-style figure")
        sp.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="PATH", help="input file (repeat for multi-input kinds)")
        sp.add_argument("--out", required=True, metavar="PATH.png")
        if kind == "fig6":
            sp.add_argument("--channel-kind", default=None)
            sp.add_argument("--gamma-db", type=float, default=None)
    return p


def render(args: argparse.Namespace) -> None:
    expected = _N_INPUTS[args.kind]
    if len(args.inputs) != expected:
        raise SchemaError(
            f"{args.kind} takes {expected} input file(s), got {len(args.inputs)}"
        )
    if args.kind == "fig2":
        header, h = load_channel_dump(args.inputs[0])
        render_fig2(header, h, args.out)
    elif args.kind == "fig4":
        render_fig4(load_csv(args.inputs[0], HARDENING_COLUMNS), args.out)
    elif args.kind == "fig6":
        trials = load_csv(args.inputs[0], TRIALS_COLUMNS)
        fits = load_fits(args.inputs[1])
        render_fig6(trials, fits, args.out,
                    channel_kind=args.channel_kind, gamma_db=args.gamma_db)
    elif args.kind == "fig8":
        render_fig8(load_regression(args.inputs[0]), args.out)
    else:
        render_fig9(load_csv(args.inputs[0], SER_COLUMNS), args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"figkit: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"figkit: runtime error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
