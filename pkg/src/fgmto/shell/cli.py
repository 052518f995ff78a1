"""Command-line entry point: ``fgmto <subcommand> [--config path] [--seed n] [--out dir] [flags]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields

from ..errors import FgmtoError
from .config import ExperimentConfig, preset_names
from .export import RunRecorder
from .pipeline import COMMANDS

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 2, 3

_TYPES = {"nx": int, "ny": int, "magnitude": float, "count": int}
_CHOICES = {
    "preset": preset_names(), "mode": ["linear", "single_scale", "multiscale"], "objective": ["J1", "J2"],
    "load_kind": ["force", "displacement"],
}
_HELP = {
    "config": "JSON config file; flags override its keys",
    "out": "output directory (default: $FGMTO_OUT/<subcommand>)",
    "paper_scale": "use full-resolution microstructures and the large dataset",
}


def _add_config_flags(p):
    for f in fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        kw = {"dest": f.name, "default": None, "help": _HELP.get(f.name)}
        if isinstance(f.default, bool):
            p.add_argument(flag, action=argparse.BooleanOptionalAction, **kw)
        elif f.name == "supports":
            p.add_argument(flag, nargs="+", **kw)
        else:
            typ = _TYPES.get(f.name) or (type(f.default) if f.default is not None else str)
            p.add_argument(flag, type=typ, choices=_CHOICES.get(f.name), **kw)


def build_parser():
    parser = argparse.ArgumentParser(prog="fgmto", description="Multiscale topology optimization pipeline.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help=_HELP["config"])
        _add_config_flags(p)
    return parser


def run(subcommand, cfg):
    """Run one subcommand; returns the exit status. Artifacts land in the config's output directory."""
    rec = RunRecorder(cfg.out_dir(subcommand), subcommand, cfg.to_dict())
    try:
        status = COMMANDS[subcommand](cfg, rec)
    except FgmtoError as exc:
        error = {"type": type(exc).__name__, "message": str(exc)}
        rec.finish("failed" if not rec.artifacts else "partial", error=error)
        print(json.dumps({"error": error, "subcommand": subcommand, "out": str(rec.out)}), file=sys.stderr)
        return EXIT_ERROR
    status = status if isinstance(status, str) else "complete"
    rec.finish(status)
    return EXIT_OK if status == "complete" else EXIT_PARTIAL


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {f.name: getattr(args, f.name) for f in fields(ExperimentConfig)}
    try:
        cfg = ExperimentConfig.load(args.config, overrides)
    except FgmtoError as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)},
                          "subcommand": args.subcommand}), file=sys.stderr)
        return EXIT_ERROR
    return run(args.subcommand, cfg)


if __name__ == "__main__":
    sys.exit(main())
