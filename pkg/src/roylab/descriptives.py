"""Summary tables for simulated panels: flows, growth histogram, quantiles."""

from __future__ import annotations

import numpy as np
import pandas as pd

from .panel import PanelDataset

DEFAULT_PROBS = (0.1, 0.25, 0.5, 0.75, 0.9)


def switcher_flows(panel: PanelDataset, K: int) -> pd.DataFrame:
    """Transition counts between consecutive years, one row per cell.

    Every (origin, destination) pair gets a row for every year pair that
    appears in the panel, including zero cells, so downstream consumers can
    reshape without reindexing.
    """
    years = np.unique(panel.year)
    pairs = [f"{y - 1}-{y}" for y in years]
    counts = np.zeros((len(years), K, K), dtype=np.int64)
    yi = np.searchsorted(years, panel.year)
    np.add.at(counts, (yi, panel.k_prev, panel.k_curr), 1)
    rows = []
    for i, p in enumerate(pairs):
        for kf in range(K):
            for kt in range(K):
                rows.append((p, kf, kt, int(counts[i, kf, kt])))
    return pd.DataFrame(rows, columns=["year_pair", "k_from", "k_to", "count"])


def switch_rate(panel: PanelDataset) -> float:
    """Share of year-over-year transitions that change occupation."""
    if panel.n_rows == 0:
        return float("nan")
    return float(np.mean(panel.k_prev != panel.k_curr))


def wage_growth_hist(panel: PanelDataset, bins: int = 60,
                     value_range: tuple[float, float] | None = None) -> pd.DataFrame:
    counts, edges = np.histogram(panel.dlogw, bins=bins, range=value_range)
    return pd.DataFrame({"bin_lo": edges[:-1], "bin_hi": edges[1:],
                         "count": counts})


def quantile_paths(panel: PanelDataset,
                   probs: tuple[float, ...] = DEFAULT_PROBS) -> pd.DataFrame:
    """Log-wage quantiles per calendar year from the levels records."""
    rows = []
    years = np.unique(panel.lv_year)
    for y in years:
        w = panel.lv_logw[panel.lv_year == y]
        qs = np.quantile(w, probs)
        for p, v in zip(probs, qs):
            rows.append((int(y), float(p), float(v)))
    return pd.DataFrame(rows, columns=["year", "prob", "value"])
