"""Command-line entry point.

    python cli.py run        [--preset NAME | --config PATH] [overrides]
    python cli.py sweep      --axis p:0:1:3 --axis q:0:1:3 [overrides]
    python cli.py snapshot   --snapshot-times 1,10,100,1000 [overrides]
    python cli.py size-sweep --sizes 400,900,1600,2500 [overrides]
    python cli.py presets

Exit status: 0 on success, 2 for configuration/parameter errors, 1 for I/O
errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Mapping, Sequence

from core.config import merge, parse_config
from core.errors import ConfigError, OutputDirectoryError, SimulationError
from core.experiments import run_experiment, run_preset
from core.presets import PRESETS, get_preset

logger = logging.getLogger("cli")

SUBCOMMAND_KINDS = {
    "run": {"single-run", "ensemble"},
    "sweep": {"sweep2d"},
    "snapshot": {"snapshot-run"},
    "size-sweep": {"size-sweep"},
}

# flag dest -> path inside the config mapping
PARAM_FLAGS = {
    "r": ("params", "r"),
    "beta": ("params", "beta"),
    "m": ("params", "M"),
    "kappa": ("params", "kappa"),
    "alpha": ("params", "alpha"),
    "gamma": ("params", "gamma"),
    "epsilon": ("params", "epsilon"),
    "p": ("params", "p"),
    "q": ("params", "q"),
    "net": ("network", "kind"),
    "side": ("network", "side"),
    "n": ("network", "n"),
    "ring_degree": ("network", "ring_degree"),
    "rewire_prob": ("network", "rewire_prob"),
    "seed": ("seeds", "master"),
    "seeds": ("seeds", "count"),
    "steps": ("steps",),
    "tail": ("tail",),
    "workers": ("workers",),
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _axis(text: str) -> dict[str, Any]:
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"axis must look like name:min:max:points, got {text!r}")
    name, lo, hi, points = parts
    try:
        return {"name": name, "min": float(lo), "max": float(hi), "points": int(points)}
    except ValueError:
        raise argparse.ArgumentTypeError(f"axis bounds must be numeric, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("configuration source")
    src.add_argument("--config", type=Path, help="JSON config file")
    src.add_argument("--preset", help="named preset (see 'presets')")
    src.add_argument("--out", help="output directory")
    src.add_argument("-v", "--verbose", action="store_true")
    src.add_argument("-q", "--quiet", action="store_true")

    run = common.add_argument_group("run control")
    run.add_argument("--seed", type=int, help="master seed (default 42)")
    run.add_argument("--seeds", type=int, help="number of independent runs")
    run.add_argument("--steps", type=int)
    run.add_argument("--tail", type=int, help="steps averaged at the end of each run")
    run.add_argument("--workers", type=int, help="parallel processes for ensembles")

    model = common.add_argument_group("model parameters")
    for flag in ("r", "beta", "kappa", "alpha", "gamma", "epsilon", "p", "q"):
        model.add_argument(f"--{flag}", type=float)
    model.add_argument("--m", type=int, help="memory length M")

    net = common.add_argument_group("network")
    net.add_argument("--net", choices=("lattice", "ws"))
    net.add_argument("--side", type=int)
    net.add_argument("--n", type=int)
    net.add_argument("--ring-degree", dest="ring_degree", type=int)
    net.add_argument("--rewire-prob", dest="rewire_prob", type=float)

    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Memory-based spatial snowdrift game with learner/profiteer switching.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single run or seeded ensemble")
    sweep = sub.add_parser("sweep", parents=[common], help="2-D parameter sweep")
    sweep.add_argument("--axis", action="append", type=_axis, dest="axes",
                       help="name:min:max:points (give twice)")
    snap = sub.add_parser("snapshot", parents=[common], help="single run with lattice snapshots")
    snap.add_argument("--snapshot-times", dest="snapshot_times", type=_int_list)
    size = sub.add_parser("size-sweep", parents=[common], help="cooperation against network size")
    size.add_argument("--sizes", type=_int_list, help="comma-separated node counts")
    sub.add_parser("presets", help="list presets")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """Nested config mapping built from the flags that were given."""
    out: dict[str, Any] = {}
    for dest, path in PARAM_FLAGS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        node = out
        for key in path[:-1]:
            node = node.setdefault(key, {})
        node[path[-1]] = value
    for dest in ("axes", "snapshot_times", "sizes"):
        value = getattr(args, dest, None)
        if value:
            out[dest] = value
    return out


def _load_config_file(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"{path}: malformed JSON ({e.msg} at line {e.lineno})") from e
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path}: top level must be a JSON object")
    return data


def _resolve_kind(command: str, data: dict[str, Any]) -> dict[str, Any]:
    allowed = SUBCOMMAND_KINDS[command]
    kind = data.get("kind")
    if kind is None:
        if command == "run":
            seeds = data.get("seeds")
            count = seeds.get("count", 20) if isinstance(seeds, Mapping) else None
            kind = "single-run" if count == 1 else "ensemble"
        else:
            (kind,) = allowed
    elif kind not in allowed:
        raise ConfigError("kind", f"{kind!r} cannot be run with the '{command}' subcommand")
    return {**data, "kind": kind}


def _print_presets() -> None:
    for name in sorted(PRESETS):
        preset = PRESETS[name]
        labels = ", ".join(c.label for c in preset.cases)
        kinds = "/".join(sorted(preset.kinds))
        print(f"{name:<16} {kinds:<13} {preset.description} [{labels}]")


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if getattr(args, "verbose", False):
        level = logging.DEBUG
    elif getattr(args, "quiet", False):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    if args.command == "presets":
        _print_presets()
        return 0

    try:
        file_data = _load_config_file(args.config)
        flags = overrides_from_args(args)
        if args.preset:
            preset = get_preset(args.preset)
            for case in preset.cases:
                _resolve_kind(args.command, merge(case.config, file_data))
            report = run_preset(args.preset, merge(file_data, flags), out=args.out or "results")
            results = report.cases
            for path in report.files:
                logger.info("preset %s report: %s", report.name, path)
        else:
            data = _resolve_kind(args.command, merge(file_data, flags))
            if args.out:
                data["out"] = args.out
            results = [run_experiment(parse_config(data))]
    except SimulationError as e:
        logger.error("%s", e)
        return 2
    except (OutputDirectoryError, OSError) as e:
        logger.error("%s", e)
        return 1

    for result in results:
        logger.info("%s finished in %.1fs: %d files in %s",
                    result.kind, result.elapsed_seconds, len(result.files), result.out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
