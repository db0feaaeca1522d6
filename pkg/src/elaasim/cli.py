"""Command-line entry point.

Subcommands:

* ``run``           execute a named preset, write the result bundle
* ``list-presets``  show the preset catalog (``--json`` for machines)
* ``fit``           fit capacity distributions to an existing trials CSV
* ``dump-channel``  export one channel realization for plotting

Exit codes: 0 ok, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from collections import defaultdict

from .presets import ExperimentSpec, get_preset, preset_table
from .scenario import ConfigError


def _parse_scalar(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_value(field_name: str, text: str):
    if field_name in ("m_grid", "cases"):
        return tuple(int(v) for v in text.split(",") if v != "")
    if field_name in ("ut_x", "ru_places_x", "gamma_db_grid"):
        return tuple(float(v) for v in text.split(",") if v != "")
    return _parse_scalar(text)


_SCENARIO_BLOCKS = ("geometry", "layout", "propagation", "visibility")


def apply_override(spec: ExperimentSpec, key: str, raw: str) -> ExperimentSpec:
    """Apply one ``block.field=value`` (or top-level ``field=value``)
    override to an experiment spec."""
    if "." in key:
        block, field_name = key.split(".", 1)
        if block == "extras":
            extras = dict(spec.extras)
            extras[field_name] = _parse_value(field_name, raw)
            return dataclasses.replace(spec, extras=extras)
        if block not in _SCENARIO_BLOCKS:
            raise ConfigError(
                f"unknown override block '{block}'; expected one of {_SCENARIO_BLOCKS}"
            )
        target = getattr(spec.scenario, block)
        if field_name not in target.__dataclass_fields__:
            raise ConfigError(f"unknown override field '{key}'")
        value = _parse_value(field_name, raw)
        scenario = dataclasses.replace(spec.scenario, **{block: dataclasses.replace(target, **{field_name: value})})
        return dataclasses.replace(spec, scenario=scenario)
    if key in ("trials", "gamma_db_grid", "mode"):
        return dataclasses.replace(spec, **{key: _parse_value(key, raw)})
    if key in ("paper_literal_weights", "paper_literal_moments"):
        scenario = dataclasses.replace(spec.scenario, **{key: bool(_parse_scalar(raw))})
        return dataclasses.replace(spec, scenario=scenario)
    raise ConfigError(f"unknown override key '{key}'")


def _cmd_run(args) -> int:
    # Import lazily: the heavy numeric stack is not needed for --help.
    from .runner import run_experiment

    spec = get_preset(args.preset)
    if args.trials is not None:
        spec = dataclasses.replace(spec, trials=args.trials)
    for item in args.override or ():
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, raw = item.split("=", 1)
        spec = apply_override(spec, key.strip(), raw.strip())
    spec.validate()
    manifest = run_experiment(spec, args.out, seed=args.seed, workers=args.workers)
    if args.report:
        from .report import render_report

        try:
            paths = render_report(args.out)
        except ImportError:
            print("warning: matplotlib unavailable, skipping report figures",
                  file=sys.stderr)
        else:
            for path in paths:
                print(f"wrote {path}")
    print(json.dumps(manifest, indent=1, sort_keys=True))
    return 0


def _cmd_list_presets(args) -> int:
    table = preset_table()
    if args.json:
        print(json.dumps(table, indent=1, sort_keys=True))
        return 0
    width = max(len(row["name"]) for row in table)
    for row in table:
        print(f"{row['name']:<{width}}  {row['description']}")
    return 0


def _cmd_fit(args) -> int:
    from .fitting import FAMILIES, DegenerateDataError, mle_fit

    families = FAMILIES if args.family == "all" else (args.family,)
    samples = defaultdict(list)
    with open(args.input, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"channel_kind", "gamma_db", "capacity"}
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{args.input}: missing column(s) {sorted(missing)}")
        for row in reader:
            samples[(row["channel_kind"], float(row["gamma_db"]))].append(float(row["capacity"]))
    records = []
    for (kind, gamma), caps in sorted(samples.items()):
        for family in families:
            rec = {"channel_kind": kind, "gamma_db": gamma, "family": family,
                   "n_samples": len(caps)}
            try:
                fit = mle_fit(family, caps)
                rec.update(theta=list(fit.theta), theta_err=fit.theta_err,
                           nll=fit.nll, converged=fit.converged)
            except (DegenerateDataError, ValueError) as exc:
                rec["error"] = str(exc)
            records.append(rec)
    print(json.dumps(records, indent=1, sort_keys=True))
    return 0


def _cmd_dump_channel(args) -> int:
    from .runner import dump_channel

    spec = get_preset(args.preset)
    dump_channel(spec, args.trial, args.out, kind=args.kind, seed=args.seed)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elaasim",
                                     description="ELAA-MIMO channel Monte Carlo simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a preset and write the result bundle")
    p_run.add_argument("--preset", required=True)
    p_run.add_argument("--seed", type=int, default=1234)
    p_run.add_argument("--trials", type=int, default=None)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="override a spec field, e.g. geometry.m_antennas=512")
    p_run.add_argument("--report", action="store_true",
                       help="also render report figures next to the CSV outputs")
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list-presets", help="show the preset catalog")
    p_list.add_argument("--json", action="store_true")
    p_list.set_defaults(func=_cmd_list_presets)

    p_fit = sub.add_parser("fit", help="fit capacity distributions to a trials CSV")
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--family", default="all",
                       choices=("all", "gaussian", "weibull", "skew_normal"))
    p_fit.set_defaults(func=_cmd_fit)

    p_dump = sub.add_parser("dump-channel", help="export one channel realization")
    p_dump.add_argument("--preset", required=True)
    p_dump.add_argument("--trial", type=int, required=True)
    p_dump.add_argument("--kind", default="proposed")
    p_dump.add_argument("--seed", type=int, default=1234)
    p_dump.add_argument("--out", default="channel-dump.csv")
    p_dump.set_defaults(func=_cmd_dump_channel)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
