"""Command-line front end.

    poptree                                   # control run, print a summary
    poptree --steps 20000 --seed 7 --out out/ # write series/histograms/majority
    poptree --sweep p_update 0.1,0.2,0.5,0.9 --out sweep/ --dot

Flags override values loaded with --config; defaults are the control
parameters.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .experiment import (
    ExperimentSpec,
    normalize_param,
    parse_param_value,
    run_experiment,
    spec_from_dict,
)

_CONFIG_FLAGS = {
    "peers": "n_peers",
    "s": "s",
    "p_update": "p_update",
    "p_add": "p_add",
    "p_file": "p_file",
    "p_leave": "p_leave",
    "steps": "t_max",
    "seed": "seed",
    "realizations": "realizations",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poptree",
        description="Simulate a popularity-governed, multi-version shared directory tree.",
    )
    parser.add_argument("--config", metavar="FILE", help="JSON experiment file to start from")
    parser.add_argument("--peers", type=int, help="population size (default 100)")
    parser.add_argument("--s", type=float, help="quality shape; mean quality is 1/(1+s)")
    parser.add_argument("--p-update", type=float, help="update probability per traversal")
    parser.add_argument("--p-add", type=float, help="probability an update adds rather than deletes a link")
    parser.add_argument("--p-file", type=float, help="probability an added node is a file")
    parser.add_argument("--p-leave", type=float, help="churn probability per chosen peer")
    parser.add_argument("--steps", type=int, help="time steps per realization (default 100000)")
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument("--realizations", type=int, help="independent runs to average (default 10)")
    parser.add_argument("--snapshot-interval", type=int, help="steps between snapshots (default 1000)")
    parser.add_argument(
        "--sweep",
        nargs=2,
        metavar=("PARAM", "VALUES"),
        help="sweep one config field over a comma list, e.g. --sweep p_update 0.1,0.2,0.5,0.9",
    )
    parser.add_argument("--out", metavar="DIR", help="directory for CSV/JSON/DOT outputs")
    parser.add_argument(
        "--dot", action="store_true", default=None, help="also write the final main tree as DOT"
    )
    parser.add_argument(
        "--literal-pseudocode",
        action="store_true",
        default=None,
        help="use the pseudocode-faithful walk variant (root never updated)",
    )
    return parser


def parse_config(argv: list[str] | None = None) -> ExperimentSpec:
    """Resolve CLI flags (and an optional config file) to an ExperimentSpec."""
    parser = build_parser()
    args = parser.parse_args(argv)

    spec = ExperimentSpec()
    if args.config:
        try:
            with open(args.config) as handle:
                spec = spec_from_dict(json.load(handle))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            parser.error(f"cannot load config {args.config}: {exc}")

    overrides = {
        field: getattr(args, flag)
        for flag, field in _CONFIG_FLAGS.items()
        if getattr(args, flag) is not None
    }
    if args.literal_pseudocode is not None:
        overrides["literal_traversal"] = True

    sweep = spec.sweep
    if args.sweep is not None:
        raw_param, raw_values = args.sweep
        try:
            param = normalize_param(raw_param)
            values = tuple(
                parse_param_value(param, v) for v in raw_values.split(",") if v.strip()
            )
            if not values:
                raise ValueError("sweep needs at least one value")
            sweep = (param, values)
        except ValueError as exc:
            parser.error(str(exc))

    try:
        spec = ExperimentSpec(
            base=replace(spec.base, **overrides),
            sweep=sweep,
            out_dir=Path(args.out) if args.out else spec.out_dir,
            snapshot_interval=args.snapshot_interval
            if args.snapshot_interval is not None
            else spec.snapshot_interval,
            emit_dot=True if args.dot else spec.emit_dot,
        )
    except ValueError as exc:
        parser.error(str(exc))
    return spec


def main(argv: list[str] | None = None) -> int:
    spec = parse_config(argv)
    bundles = run_experiment(spec)
    for bundle in bundles:
        label = "run" if bundle.sweep_value is None else (
            f"{spec.sweep[0]}={bundle.sweep_value}"  # type: ignore[index]
        )
        final = bundle.average[-1]
        print(
            f"{label}: t={final.t} main tree {final.main_tree_size:.1f} nodes, "
            f"mean quality {final.main_tree_avg_quality:.3f}, "
            f"{final.total_nodes:.0f} nodes / {final.total_versions:.0f} versions total "
            f"({len(bundle.series)} realizations)"
        )
    if spec.out_dir is not None:
        print(f"outputs written to {spec.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
