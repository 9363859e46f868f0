"""Command-line driver.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import yaml

from . import experiments
from .config import (
    GRID_HELP,
    KEY_HELP,
    PRESET_COMMAND,
    PRESETS,
    config_from_dict,
    config_to_dict,
    dump_config,
)
from .errors import ConfigError, NumericalError

log = logging.getLogger("floquet_krylov")

DEFAULT_OUTPUTS = {
    "complexity": ["summary", "timeseries", "coefficients"],
    "spectral": ["spectral"],
    "sweep": ["sweep", "rescaled"],
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1); argparse would use 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _epilog() -> str:
    lines = ["configuration keys (YAML file, overridable with --set KEY=VALUE):"]
    lines += [f"  {key:<22} {text}" for key, text in KEY_HELP.items()]
    lines += ["", GRID_HELP, "", "presets: " + ", ".join(f"{n} ({c})" for n, c in PRESET_COMMAND.items())]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML experiment configuration")
    common.add_argument("--preset", choices=sorted(PRESETS), help="start from a named figure preset")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key; VALUE is parsed as YAML")
    common.add_argument("--output", "-o", help="output path; extra tables go to <stem>.<table><ext>")
    common.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    common.add_argument("--seed", type=int, help="seed for random initial states / Monte Carlo")
    common.add_argument("--workers", type=int, help="worker processes for parameter points")
    common.add_argument("--force", action="store_true", help="overwrite existing output files")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = _Parser(
        prog="floquet-krylov",
        description="Krylov spread complexity and level statistics for kicked quantum maps.",
        epilog=_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("complexity", "spread complexity, entropy and Arnoldi coefficients"),
        ("spectral", "quasi-energy ratio statistic, eta and spacing histograms"),
        ("sweep", "Krylov and spectral diagnostics across a one- or two-parameter grid"),
    ]:
        sub.add_parser(name, parents=[common], help=text, epilog=_epilog(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    cal = sub.add_parser("calibrate-rmt", parents=[common], help="Monte Carlo Poisson / GOE ratio anchors")
    cal.add_argument("--poisson-levels", type=int, default=100_000)
    cal.add_argument("--goe-dim", type=int, default=1000)
    cal.add_argument("--goe-samples", type=int, default=50)
    pre = sub.add_parser("presets", help="list presets or print one as YAML")
    pre.add_argument("name", nargs="?", choices=sorted(PRESETS))
    return parser


def _parse_overrides(items: list[str]) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        try:
            out[key.strip()] = yaml.safe_load(value)
        except yaml.YAMLError as exc:
            raise ConfigError(f"--set {key}: cannot parse {value!r}") from exc
    return out


def resolve_config(args):
    raw: dict = {}
    if args.preset:
        raw.update(PRESETS[args.preset])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"{args.config} must contain a mapping of keys to values")
        raw.update(loaded)
    for key, value in _parse_overrides(args.set).items():
        if key.startswith("initial_state."):
            state = raw.get("initial_state", {})
            state = {"kind": state} if isinstance(state, str) else dict(state)
            state[key.split(".", 1)[1]] = value
            raw["initial_state"] = state
        else:
            raw[key] = value
    if args.seed is not None:
        state = raw.get("initial_state", {})
        state = {"kind": state} if isinstance(state, str) else dict(state)
        state["seed"] = args.seed
        raw["initial_state"] = state
    if args.workers is not None:
        raw["workers"] = args.workers
    return config_from_dict(raw)


def _output_paths(output: str, names: list[str], fmt: str) -> dict[str, str]:
    stem, ext = os.path.splitext(output)
    ext = ext or (".csv" if fmt == "csv" else ".jsonl")
    return {name: (stem + ext if i == 0 else f"{stem}.{name}{ext}") for i, name in enumerate(names)}


def _write(tables: dict, names: list[str], args) -> None:
    names = [n for n in names if n in tables]
    if args.output is None:
        for name in names:
            sys.stdout.write(f"# {name}\n")
            text = (experiments.table_to_csv if args.format == "csv" else experiments.table_to_jsonl)(tables[name])
            sys.stdout.write(text)
        return
    for name, path in _output_paths(args.output, names, args.format).items():
        experiments.emit(tables[name], args.format, path, force=args.force)
        log.info("wrote %s (%d rows) to %s", name, len(tables[name]), path)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "presets":
            if args.name:
                sys.stdout.write(f"# command: {PRESET_COMMAND[args.name]}\n")
                sys.stdout.write(dump_config(config_from_dict(PRESETS[args.name])))
            else:
                for name, command in PRESET_COMMAND.items():
                    sys.stdout.write(f"{name}\t{command}\n")
            return 0
        if args.command == "calibrate-rmt":
            table = experiments.calibrate_rmt(
                seed=args.seed or 0, poisson_levels=args.poisson_levels,
                goe_dim=args.goe_dim, goe_samples=args.goe_samples,
            )
            _write({"calibration": table}, ["calibration"], args)
            return 0
        cfg = resolve_config(args)
        log.info("configuration:\n%s", yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
        runner = {"complexity": experiments.run_complexity, "spectral": experiments.run_spectral,
                  "sweep": experiments.run_sweep}[args.command]
        tables = runner(cfg)
        names = list(cfg.outputs) or DEFAULT_OUTPUTS[args.command]
        if args.command == "spectral" and "histogram" in names and "spectral" not in names:
            names.insert(0, "spectral")
        _write(tables, names, args)
        return 0
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return 1
    except (NumericalError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return 2
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return 3
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
