"""Monte Carlo experiment driver.

Repetitions are the unit of parallelism.  Each repetition simulates its own
panel from a seed derived deterministically from (base_seed, rep index) and
runs every requested estimator; the driver then averages the estimates in
repetition order and writes one directory per (scenario, estimator) plus a
descriptives directory and a machine-readable report.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from . import descriptives, estimators, io
from .dgp import simulate_careers
from .panel import AgeGrouping, OccupationSet, PanelDataset, TimeFrame, flatten
from .scenarios import (PROFILES, Profile, Scenario, builtin_scenarios,
                        default_frame, default_grouping, default_occupations)


def rep_seed(base_seed: int, rep: int) -> int:
    """Stable 64-bit seed for one repetition."""
    ss = np.random.SeedSequence([int(base_seed), int(rep)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class RepetitionResult:
    rep: int
    prices: dict[str, pd.DataFrame]
    gammas: dict[str, pd.DataFrame]
    amenities: dict[str, pd.DataFrame]
    switch_rate: float
    n_diff_rows: int
    panel: PanelDataset | None = None   # retained for rep 0 descriptives


def amenity_frame(est: estimators.EstimateSet, frame: TimeFrame,
                  grouping: AgeGrouping, K: int) -> pd.DataFrame | None:
    levels = est.amenity_levels(frame, grouping, K)
    if levels is None:
        return None
    rows = []
    for a in range(levels.shape[0]):
        for i, y in enumerate(frame.analysis_years):
            for k in range(K):
                rows.append((a, int(y), k, levels[a, i, k]))
    return pd.DataFrame(rows, columns=["age_group", "year", "k", "psi_hat"])


def run_repetition(scenario: Scenario, profile: Profile, rep: int,
                   frame: TimeFrame, grouping: AgeGrouping,
                   occs: OccupationSet, keep_panel: bool = False,
                   n_workers: int | None = None) -> RepetitionResult:
    seed_cfg = scenario.seed_config(profile)
    if n_workers is not None:
        from dataclasses import replace
        seed_cfg = replace(seed_cfg, n_workers=n_workers)
    params = scenario.parameters(frame)
    careers = simulate_careers(seed_cfg, params, frame, grouping, occs,
                               seed=rep_seed(scenario.base_seed, rep))
    panel = flatten(careers, frame, grouping)
    prices, gammas, amen = {}, {}, {}
    for method in scenario.estimators:
        est = estimators.estimate(panel, method, frame, grouping, occs)
        prices[method] = estimators.prices_frame(est, params, frame, occs.K)
        gammas[method] = estimators.gammas_frame(est, params, grouping, occs.K)
        af = amenity_frame(est, frame, grouping, occs.K)
        if af is not None:
            amen[method] = af
    return RepetitionResult(
        rep=rep, prices=prices, gammas=gammas, amenities=amen,
        switch_rate=descriptives.switch_rate(panel),
        n_diff_rows=panel.n_rows,
        panel=panel if keep_panel else None)


def _aggregate_prices(frames: list[pd.DataFrame]) -> pd.DataFrame:
    out = frames[0][["year", "k", "truth_dpi", "truth_pi"]].copy()
    out.insert(2, "dpi", np.mean([f["dpi"].to_numpy() for f in frames], axis=0))
    out.insert(3, "pi_cum",
               np.mean([f["pi_cum"].to_numpy() for f in frames], axis=0))
    return out


def _aggregate_gammas(frames: list[pd.DataFrame]) -> pd.DataFrame:
    stack = np.stack([f["gamma_hat"].to_numpy() for f in frames])
    out = frames[0][["age_group", "k_prev", "k_curr", "gamma_true"]].copy()
    counts = np.sum(~np.isnan(stack), axis=0)
    sums = np.nansum(stack, axis=0)
    mean = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    out.insert(3, "gamma_hat", mean)
    if len(frames) > 1:
        sq = np.nansum((stack - mean[None, :]) ** 2, axis=0)
        sigma = np.where(counts > 1, np.sqrt(sq / np.maximum(counts - 1, 1)),
                         np.nan)
    else:
        sigma = frames[0]["sigma_gamma"].to_numpy()
    out["sigma_gamma"] = sigma
    return out[["age_group", "k_prev", "k_curr", "gamma_hat", "gamma_true",
                "sigma_gamma"]]


def _aggregate_amenities(frames: list[pd.DataFrame]) -> pd.DataFrame:
    out = frames[0][["age_group", "year", "k"]].copy()
    stack = np.stack([f["psi_hat"].to_numpy() for f in frames])
    # cells unidentified in every repetition stay NaN without warnings
    counts = np.sum(~np.isnan(stack), axis=0)
    sums = np.nansum(stack, axis=0)
    out["psi_hat"] = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return out


def _estimator_metrics(prices: pd.DataFrame, gammas: pd.DataFrame) -> dict:
    err = prices["pi_cum"] - prices["truth_pi"]
    final = prices["year"] == prices["year"].max()
    diag = gammas["k_prev"] == gammas["k_curr"]
    gerr = gammas["gamma_hat"] - gammas["gamma_true"]
    return {
        "price_mae": float(np.nanmean(np.abs(err))),
        "price_final_year_max_abs_err": float(np.nanmax(np.abs(err[final]))),
        "gamma_diag_mae": float(np.nanmean(np.abs(gerr[diag]))),
        "gamma_cross_mae": (float(np.nanmean(np.abs(gerr[~diag])))
                            if (~diag).any() else None),
    }


def run_experiment(scenario: Scenario, out_dir: str | Path,
                   profile: Profile | str = "desk", threads: int = 1,
                   frame: TimeFrame | None = None,
                   grouping: AgeGrouping | None = None,
                   occs: OccupationSet | None = None,
                   n_reps: int | None = None,
                   n_workers: int | None = None,
                   write_rep_files: bool = True) -> dict:
    """Run one scenario end to end and write its output directory."""
    if isinstance(profile, str):
        profile = PROFILES[profile]
    frame = frame or default_frame()
    grouping = grouping or default_grouping()
    occs = occs or default_occupations()
    reps = n_reps if n_reps is not None else profile.n_reps
    out = Path(out_dir) / scenario.name
    t0 = time.time()

    def work(r):
        return run_repetition(scenario, profile, r, frame, grouping, occs,
                              keep_panel=(r == 0), n_workers=n_workers)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(reps)))
    else:
        results = [work(r) for r in range(reps)]
    results.sort(key=lambda r: r.rep)

    report = {
        "scenario": scenario.name,
        "description": scenario.description,
        "profile": profile.name,
        "n_workers": n_workers if n_workers is not None else profile.n_workers,
        "n_reps": reps,
        "base_seed": scenario.base_seed,
        "estimators": list(scenario.estimators),
        "switch_rate_rep0": results[0].switch_rate,
        "n_diff_rows_rep0": results[0].n_diff_rows,
        "metrics": {},
    }

    for method in scenario.estimators:
        mdir = out / method
        pframes = [r.prices[method] for r in results]
        gframes = [r.gammas[method] for r in results]
        agg_p = _aggregate_prices(pframes)
        agg_g = _aggregate_gammas(gframes)
        io.write_csv(agg_p, mdir / "prices.csv")
        io.write_csv(agg_g, mdir / "gammas.csv")
        if write_rep_files:
            for r in results:
                io.write_csv(r.prices[method],
                             mdir / "reps" / f"prices_r{r.rep:03d}.csv")
        if method in results[0].amenities:
            aframes = [r.amenities[method] for r in results]
            io.write_csv(_aggregate_amenities(aframes), mdir / "amenities.csv")
        report["metrics"][method] = _estimator_metrics(agg_p, agg_g)

    panel0 = results[0].panel
    ddir = out / "descriptives"
    io.write_csv(descriptives.switcher_flows(panel0, occs.K), ddir / "flows.csv")
    io.write_csv(descriptives.wage_growth_hist(panel0), ddir / "growth_hist.csv")
    io.write_csv(descriptives.quantile_paths(panel0), ddir / "quantiles.csv")

    report["elapsed_seconds"] = round(time.time() - t0, 3)
    io.write_json(report, out / "report.json")
    return report


def run_many(scenario_names: list[str] | None, out_dir: str | Path,
             profile: Profile | str = "desk", threads: int = 1,
             **kwargs) -> dict:
    catalogue = builtin_scenarios()
    names = scenario_names or list(catalogue)
    reports = {}
    for name in names:
        if name not in catalogue:
            raise KeyError(f"unknown scenario {name!r}")
        reports[name] = run_experiment(catalogue[name], out_dir, profile,
                                       threads, **kwargs)
    return reports
