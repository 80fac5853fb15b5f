"""Command-line front end: scenario dispatch with deterministic outputs.

Subcommands mirror the scenario ids one-to-one; `list` prints them.
Parameters come from an optional JSON config file plus flags (flags
win).  Each run writes one CSV per result table and a metadata.json
that re-parses into an equivalent run configuration.

Exit codes: 0 success, 2 configuration error, 3 numeric/domain error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import difflib
import inspect
import json
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .dispersion import DispersionError
from .io import atomic_write_files, json_text, table_to_csv
from .phasematch import PhasematchError
from .scenarios import SCENARIO_NOTES, SCENARIOS, run_rate_vs_nl
from .spatial import SpatialError
from .spectra import SpectraError
from .structures import StructureError
from .temporal import TemporalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

OUT_DIR_ENV = "RANDPOLED_OUT_DIR"
_RESERVED = ("scenario", "seed", "out_dir", "threads", "parameters")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str
    seed: int = 0
    out_dir: str = "."
    threads: int | None = None
    params: dict = field(default_factory=dict)


def _signature_of(scenario: str):
    func = SCENARIOS[scenario]
    if scenario == "width-vs-NL":
        func = run_rate_vs_nl  # shares the full parameter set
    return func, inspect.signature(func)


def scenario_defaults(scenario: str) -> dict:
    _, sig = _signature_of(scenario)
    return {name: p.default for name, p in sig.parameters.items()
            if name != "seed" and p.default is not inspect.Parameter.empty}


def _coerce(value, default):
    """Coerce a config/flag value to the type implied by the default."""
    if isinstance(default, bool):
        return bool(value)
    if isinstance(default, int) and not isinstance(value, bool):
        return int(value)
    if isinstance(default, float):
        return float(value)
    if isinstance(default, (tuple, list)):
        if isinstance(value, str):
            value = [_parse_token(v) for v in value.split(",") if v]
        return tuple(value)
    return value


def _parse_token(token: str):
    token = token.strip()
    for caster in (int, float):
        try:
            return caster(token)
        except ValueError:
            pass
    return token


def _validate_params(scenario: str, raw: dict) -> dict:
    defaults = scenario_defaults(scenario)
    params = {}
    for key, value in raw.items():
        if key not in defaults:
            hint = difflib.get_close_matches(key, list(defaults) + list(_RESERVED),
                                             n=1)
            suffix = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ConfigError(
                f"unknown parameter {key!r} for scenario {scenario!r}{suffix}")
        try:
            params[key] = _coerce(value, defaults[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key!r}: {exc}") from exc
    return params


def parse_config(path: str | None, overrides: dict) -> RunConfig:
    """Merge a JSON config file with flag overrides into a RunConfig."""
    data: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config parse error at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
    raw_params = dict(data.get("parameters", {}))
    for key, value in data.items():
        if key not in _RESERVED:
            raw_params[key] = value
    scenario = overrides.get("scenario") or data.get("scenario")
    if scenario is None:
        raise ConfigError("no scenario given (config key 'scenario' or subcommand)")
    if scenario not in SCENARIOS:
        hint = difflib.get_close_matches(scenario, SCENARIOS, n=1)
        suffix = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigError(f"unknown scenario {scenario!r}{suffix}")
    for key, value in overrides.get("params", {}).items():
        if value is not None:
            raw_params[key] = value
    params = _validate_params(scenario, raw_params)
    seed = overrides.get("seed")
    if seed is None:
        seed = data.get("seed", 0)
    out_dir = overrides.get("out_dir") or data.get("out_dir") \
        or os.environ.get(OUT_DIR_ENV) or "."
    threads = overrides.get("threads", data.get("threads"))
    return RunConfig(scenario=scenario, seed=int(seed), out_dir=str(out_dir),
                     threads=threads, params=params)


def run(config: RunConfig) -> int:
    """Execute the scenario and write its output bundle."""
    func = SCENARIOS[config.scenario]
    resolved = scenario_defaults(config.scenario) | config.params
    print(f"randpoled: running {config.scenario} (seed {config.seed}) ...",
          file=sys.stderr)
    try:
        result = func(seed=config.seed, **config.params)
    except (StructureError, DispersionError, PhasematchError, SpectraError,
            TemporalError, SpatialError) as exc:
        _emit_error("numeric", str(exc))
        return EXIT_NUMERIC
    files = {f"{name}.csv": table_to_csv(table)
             for name, table in result.tables.items()}
    # the threads hint is advisory and deliberately left out of the
    # metadata so outputs stay byte-identical across worker counts
    metadata = {
        "scenario": config.scenario,
        "seed": config.seed,
        "parameters": {k: _jsonable(v) for k, v in resolved.items()},
        "version": __version__,
        "extra": _jsonable(result.metadata),
    }
    files["metadata.json"] = json_text(metadata)
    try:
        atomic_write_files(config.out_dir, files)
    except OSError as exc:
        _emit_error("io", str(exc))
        return EXIT_IO
    print(f"randpoled: wrote {len(files)} files to {config.out_dir}",
          file=sys.stderr)
    return EXIT_OK


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return value.item()
    return value


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randpoled",
        description="Photon-pair simulator for randomly poled and chirped "
                    "quasi-phase-matched crystals",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list available scenarios")
    for scenario in SCENARIOS:
        sp = sub.add_parser(scenario, help=SCENARIO_NOTES[scenario])
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="random seed (default 0)")
        sp.add_argument("--out-dir", help="output directory "
                        f"(default: ${OUT_DIR_ENV} or '.')")
        sp.add_argument("--threads", type=int,
                        help="advisory worker-count hint; never affects results")
        for name, default in scenario_defaults(scenario).items():
            flag = "--" + name.replace("_", "-")
            if isinstance(default, bool):
                sp.add_argument(flag, type=lambda v: v.lower() in ("1", "true"),
                                default=None)
            elif isinstance(default, (tuple, list)):
                sp.add_argument(flag, default=None, metavar="V1,V2,...")
            elif isinstance(default, str):
                sp.add_argument(flag, default=None)
            else:
                sp.add_argument(flag, type=float, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        for scenario in SCENARIOS:
            print(f"{scenario:20s} {SCENARIO_NOTES[scenario]}")
        return EXIT_OK
    arg_dict = vars(args)
    defaults = scenario_defaults(args.command)
    params = {}
    for name, default in defaults.items():
        value = arg_dict.get(name)
        if value is not None:
            if isinstance(default, int) and not isinstance(default, bool) \
                    and not isinstance(default, (tuple, list)):
                value = int(value)
            params[name] = value
    overrides = {
        "scenario": args.command,
        "seed": args.seed,
        "out_dir": args.out_dir,
        "threads": args.threads,
        "params": params,
    }
    try:
        config = parse_config(args.config, overrides)
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
