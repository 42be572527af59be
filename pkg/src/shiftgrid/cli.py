"""Command-line driver for the benchmark experiments.

Subcommands: ``tune``, ``nn-compare``, ``roadmap-build``, ``converge``, and
``scenario-emit``. Settings come from an INI config file (one section per
subcommand plus ``[common]``) and/or command-line flags; flags win. Exit
codes: 0 success, 1 configuration error, 2 runtime error.

Example::

    shiftgrid-bench nn-compare --dims 3,6 --n-list 400,800 --out nn.csv
    shiftgrid-bench converge --config bench.ini --seed-list 0,1,2,3
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import fields, replace

from .bench import (ConfigError, ConvergeConfig, NnCompareConfig, ResultRow,
                    RoadmapBuildConfig, ScenarioEmitConfig, TuneConfig,
                    run_converge, run_nn_compare, run_roadmap_build,
                    run_scenario_emit, run_tune, write_rows)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _int_list(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip() != "")

def _float_list(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip() != "")

def _str_list(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip() != "")


# field name -> parser for values arriving as strings (file or CLI)
_PARSERS = {
    "d": int, "n": int, "trials": int, "base_seed": int, "jobs": int,
    "target_recall": float, "eta": float, "mu": float,
    "goal_radius": float, "steer_eps": float,
    "m_list": _int_list, "ctilde_list": _float_list, "n_list": _int_list,
    "dims": _int_list, "schedule": _int_list, "seeds": _int_list,
    "backends": _str_list,
    "radius_formula": str, "store": str, "scenario": str, "planner": str,
    "backend": str, "radius_mode": str,
}

_COMMANDS = {
    "tune": (TuneConfig, run_tune),
    "nn-compare": (NnCompareConfig, run_nn_compare),
    "roadmap-build": (RoadmapBuildConfig, run_roadmap_build),
    "converge": (ConvergeConfig, run_converge),
}


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage errors as config errors (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's unset globals from clobbering values the
    # top-level parser already captured (subparsers re-parse into a fresh
    # namespace and copy it over)
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="INI config file")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output path (CSV, or JSON for scenario-emit)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker threads for independent runs")
    common.add_argument("--seed-list", dest="seeds", default=argparse.SUPPRESS,
                        help="comma-separated seeds, e.g. 0,1,2")

    parser = _Parser(prog="shiftgrid-bench", parents=[common],
                     description="Neighbor-search and planner benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, (cfg_cls, _) in _COMMANDS.items():
        p = sub.add_parser(name, parents=[common])
        for f in fields(cfg_cls):
            if f.name in ("seeds", "jobs"):
                continue  # global flags
            p.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name)

    p = sub.add_parser("scenario-emit", parents=[common])
    p.add_argument("--scenario", dest="scenario")
    p.add_argument("--d", dest="d")
    return parser


def _load_file_section(path: str | None, section: str) -> dict:
    if not path:
        return {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    merged = {}
    for sec in ("common", section):
        if parser.has_section(sec):
            merged.update(dict(parser.items(sec)))
    return merged


_GLOBAL_KEYS = {"out", "jobs", "seeds"}


def _build_config(cfg_cls, file_values: dict, args: argparse.Namespace):
    cfg = cfg_cls()
    updates = {}
    valid = {f.name for f in fields(cfg_cls)}
    for key, raw in file_values.items():
        if key not in valid:
            if key in _GLOBAL_KEYS:
                continue  # global key, not used by this command
            raise ConfigError(f"unknown config key {key!r} for this command")
        updates[key] = _parse_value(key, raw)
    for f in fields(cfg_cls):
        raw = getattr(args, f.name, None)
        if raw is not None:
            updates[f.name] = _parse_value(f.name, raw)
    try:
        return replace(cfg, **updates)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _parse_value(key: str, raw):
    if not isinstance(raw, str):
        return raw
    parser = _PARSERS.get(key, str)
    try:
        return parser(raw)
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r} for {key!r}")


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        file_values = _load_file_section(getattr(args, "config", None), args.command)
        out_path = getattr(args, "out", None) or file_values.get("out") or (
            "scenario.json" if args.command == "scenario-emit" else "results.csv")

        if args.command == "scenario-emit":
            cfg = _build_config(ScenarioEmitConfig, file_values, args)
            run_scenario_emit(cfg, out_path)
            print(f"wrote scenario to {out_path}")
            return EXIT_OK

        cfg_cls, runner = _COMMANDS[args.command]
        cfg = _build_config(cfg_cls, file_values, args)
        rows: list[ResultRow] = runner(cfg)
        write_rows(out_path, rows)
        print(f"wrote {len(rows)} rows to {out_path}")
        return EXIT_OK
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 -- CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
