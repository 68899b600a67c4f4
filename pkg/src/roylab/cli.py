"""Command line entry points.

Exit codes: 0 success, 2 configuration problem (bad flags or config file),
3 runtime failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import descriptives, estimators, experiment, io
from .dgp import simulate_careers
from .panel import flatten, panel_from_frames
from .scenarios import (PROFILES, Scenario, builtin_scenarios, default_frame,
                        default_grouping, default_occupations)

EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


def _load_scenario(args) -> Scenario:
    catalogue = builtin_scenarios()
    overrides = {}
    name = getattr(args, "scenario", None)
    if getattr(args, "config", None):
        cfg = io.read_json(args.config)
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        name = cfg.pop("scenario", name)
        for key in ("n_workers", "n_reps"):
            if key in cfg:
                setattr(args, key, cfg.pop(key))
        overrides = cfg
    if name is None:
        raise ConfigError("no scenario given (use --scenario or a config file)")
    if name not in catalogue:
        known = ", ".join(sorted(catalogue))
        raise ConfigError(f"unknown scenario {name!r}; known: {known}")
    scenario = catalogue[name]
    if getattr(args, "seed", None) is not None:
        overrides["base_seed"] = args.seed
    if overrides:
        bad = set(overrides) - set(Scenario.__dataclass_fields__)
        if bad:
            raise ConfigError(f"unknown config keys: {sorted(bad)}")
        if "amenity_trend" in overrides:
            overrides["amenity_trend"] = tuple(overrides["amenity_trend"])
        if "estimators" in overrides:
            overrides["estimators"] = tuple(overrides["estimators"])
        scenario = replace(scenario, **overrides)
    return scenario


def _cmd_simulate(args) -> int:
    scenario = _load_scenario(args)
    frame, grouping, occs = default_frame(), default_grouping(), default_occupations()
    profile = PROFILES[args.profile]
    seed_cfg = scenario.seed_config(profile)
    if args.n_workers:
        seed_cfg = replace(seed_cfg, n_workers=args.n_workers)
    params = scenario.parameters(frame)
    careers = simulate_careers(seed_cfg, params, frame, grouping, occs,
                               seed=experiment.rep_seed(scenario.base_seed, args.rep))
    panel = flatten(careers, frame, grouping)
    out = Path(args.out)
    io.write_csv(panel.diff_frame(), out / "diff.csv")
    io.write_csv(panel.levels_frame(), out / "levels.csv")
    print(f"wrote {panel.n_rows} growth rows and {panel.n_level_rows} "
          f"level rows to {out}")
    return 0


def _read_panel(in_dir: str):
    in_dir = Path(in_dir)
    diff = io.read_csv(in_dir / "diff.csv")
    levels_path = in_dir / "levels.csv"
    levels = io.read_csv(levels_path) if levels_path.exists() else None
    return panel_from_frames(diff, levels, default_grouping())


def _cmd_estimate(args) -> int:
    if args.method not in estimators.ALL_METHODS:
        raise ConfigError(f"unknown method {args.method!r}; "
                          f"known: {', '.join(estimators.ALL_METHODS)}")
    frame, grouping, occs = default_frame(), default_grouping(), default_occupations()
    panel = _read_panel(args.in_dir)
    params = None
    if args.scenario or args.config:
        params = _load_scenario(args).parameters(frame)
    est = estimators.estimate(panel, args.method, frame, grouping, occs)
    out = Path(args.out)
    io.write_csv(estimators.prices_frame(est, params, frame, occs.K),
                 out / "prices.csv")
    io.write_csv(estimators.gammas_frame(est, params, grouping, occs.K),
                 out / "gammas.csv")
    af = experiment.amenity_frame(est, frame, grouping, occs.K)
    if af is not None:
        io.write_csv(af, out / "amenities.csv")
    if est.dropped:
        print(f"note: {len(est.dropped)} collinear columns dropped",
              file=sys.stderr)
    print(f"estimated {len(est.coefficients)} coefficients "
          f"({est.method}, {est.n_rows} rows) into {out}")
    return 0


def _cmd_experiment(args) -> int:
    scenario = _load_scenario(args)
    threads = io.resolve_threads(args.threads)
    report = experiment.run_experiment(
        scenario, args.out, profile=args.profile, threads=threads,
        n_reps=args.n_reps, n_workers=args.n_workers)
    print(f"scenario {report['scenario']}: {report['n_reps']} repetitions, "
          f"{threads} thread(s), {report['elapsed_seconds']}s")
    for method, m in report["metrics"].items():
        print(f"  {method}: price MAE {m['price_mae']:.5f}, "
              f"diagonal accumulation MAE {m['gamma_diag_mae']:.5f}")
    return 0


def _cmd_describe(args) -> int:
    occs = default_occupations()
    panel = _read_panel(args.in_dir)
    out = Path(args.out)
    io.write_csv(descriptives.switcher_flows(panel, occs.K), out / "flows.csv")
    io.write_csv(descriptives.wage_growth_hist(panel), out / "growth_hist.csv")
    io.write_csv(descriptives.quantile_paths(panel), out / "quantiles.csv")
    print(f"wrote descriptives for {panel.n_rows} growth rows to {out}")
    return 0


def _cmd_scenarios(args) -> int:
    for name, s in builtin_scenarios().items():
        print(f"{name}: {s.description} [estimators: {', '.join(s.estimators)}]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roylab",
        description="Simulated occupation panels and skill-price estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_out=True):
        p.add_argument("--scenario", help="built-in scenario name")
        p.add_argument("--config", help="JSON file with scenario overrides")
        p.add_argument("--seed", type=int, help="override the base seed")
        p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
        p.add_argument("--n-workers", type=int, default=None,
                       help="override the profile's worker count")
        if need_out:
            p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("simulate", help="simulate one panel and write CSVs")
    common(p)
    p.add_argument("--rep", type=int, default=0,
                   help="repetition index feeding the seed derivation")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="estimate prices from panel CSVs")
    p.add_argument("--in", dest="in_dir", required=True,
                   help="directory holding diff.csv (and levels.csv)")
    p.add_argument("--method", required=True,
                   choices=list(estimators.ALL_METHODS))
    common(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a Monte Carlo scenario")
    common(p)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (or set ROYLAB_THREADS)")
    p.add_argument("--n-reps", type=int, default=None,
                   help="override the profile's repetition count")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("describe", help="summary tables from panel CSVs")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_describe)

    p = sub.add_parser("scenarios", help="list built-in scenarios")
    p.set_defaults(func=_cmd_scenarios)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except io.OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - map anything else to runtime
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
