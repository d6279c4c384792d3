"""Command-line entry point.

Examples:
    cogd2d --list-presets
    cogd2d --preset fig5 --engines analytic --out out/fig5.csv --plot
    cogd2d --config my.ini --policy psa --cd-side ul --iterations 2000
    cogd2d --dump-config baseline.ini
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ExperimentConfig, load_config, save_config
from .plotting import render_rows
from .presets import PRESETS, get_preset_config
from .runner import run_experiment, write_outputs


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cogd2d",
        description="Outage analysis for cognitive energy-harvesting D2D "
        "underlay networks: analytic and Monte Carlo engines, CSV output.",
    )
    p.add_argument("--config", metavar="PATH", help="sectioned key=value config file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a canned sweep")
    p.add_argument("--policy", choices=["rsa", "psa"], help="restrict to one access policy")
    p.add_argument("--cd-side", choices=["dl", "ul"], help="restrict the D2D channel side")
    p.add_argument("--engines", choices=["analytic", "mc", "both"])
    p.add_argument("--iterations", type=int, metavar="N", help="Monte Carlo iterations")
    p.add_argument("--seed", type=int, metavar="N", help="Monte Carlo base seed")
    p.add_argument("--out", metavar="PATH", help="output CSV path")
    p.add_argument("--workers", type=int, metavar="N", help="parallel worker processes")
    p.add_argument("--window-km", type=float, metavar="KM", help="simulation window side")
    p.add_argument("--sensing-mode", choices=["faded", "meandisc"])
    p.add_argument("--plot", action="store_true", help="render a PNG next to each CSV")
    p.add_argument("--list-presets", action="store_true", help="describe presets and exit")
    p.add_argument("--dump-config", metavar="PATH", help="write the effective config and exit")
    return p


def _effective_config(args) -> ExperimentConfig:
    config = get_preset_config(args.preset) if args.preset else ExperimentConfig()
    if args.config:
        config = load_config(args.config)
    overrides = {}
    if args.policy:
        overrides["policies"] = (args.policy,)
    if args.cd_side:
        overrides["cd_sides"] = (args.cd_side,)
    if args.engines:
        overrides["engines"] = args.engines
    if args.iterations:
        overrides["iterations"] = args.iterations
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out:
        overrides["out_path"] = args.out
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.window_km:
        overrides["window_km"] = args.window_km
    if args.sensing_mode:
        overrides["sensing_mode"] = args.sensing_mode
    return replace(config, **overrides) if overrides else config


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)

    if args.list_presets:
        for preset in PRESETS.values():
            print(f"{preset.name}: sweeps {preset.sweep_var}; {preset.description}")
        return 0

    try:
        config = _effective_config(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.dump_config:
        save_config(config, args.dump_config)
        print(f"wrote {args.dump_config}")
        return 0

    out = config.out_path or (f"{args.preset}.csv" if args.preset else "results.csv")
    grouped = run_experiment(config)
    paths = write_outputs(grouped, out)
    for path in paths:
        print(f"wrote {path}")

    if args.plot:
        preset = PRESETS.get(args.preset) if args.preset else None
        metrics = preset.headline if preset else ("O_D_tot",)
        log_x = preset.log_x if preset else False
        by_path = dict(zip(paths, grouped.values()))
        for path, rows in by_path.items():
            png = Path(path).with_suffix(".png")
            title = preset.description if preset else ""
            render_rows(rows, metrics, png, title=title, log_x=log_x)
            print(f"wrote {png}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
