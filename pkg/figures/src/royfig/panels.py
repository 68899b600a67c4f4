"""The five panel renderers.

Styling follows one convention throughout: occupations keep a fixed color,
estimates are solid lines or bars, and true parameter values are drawn as
black crosses on top.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .schemas import SchemaError, load_table

OCC_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def occupation_color(k: int) -> str:
    return OCC_COLORS[k % len(OCC_COLORS)]


def _rep_tables(agg_path: Path) -> list[pd.DataFrame]:
    """Per-repetition price tables next to the aggregate, if published."""
    reps_dir = agg_path.parent / "reps"
    if not reps_dir.is_dir():
        return []
    out = []
    for p in sorted(reps_dir.glob("prices_r*.csv")):
        try:
            out.append(load_table("prices", p))
        except (SchemaError, OSError):
            continue
    return out


def render_prices(in_path: Path, ax: plt.Axes) -> None:
    df = load_table("prices", in_path)
    for rep in _rep_tables(in_path):
        for k, grp in rep.groupby("k"):
            ax.plot(grp.year, grp.pi_cum, color=occupation_color(int(k)),
                    lw=0.5, alpha=0.25, zorder=1)
    for k, grp in df.groupby("k"):
        ax.plot(grp.year, grp.pi_cum, color=occupation_color(int(k)),
                lw=1.8, label=f"occupation {int(k)}", zorder=2)
        truth = grp.dropna(subset=["truth_pi"])
        if len(truth):
            ax.plot(truth.year, truth.truth_pi, "x", color="black",
                    ms=5, mew=1.4, zorder=3)
    ax.set_xlabel("year")
    ax.set_ylabel("cumulative log price change")
    ax.legend(frameon=False, fontsize=8)
    ax.set_title("Cumulative skill prices (lines: estimates, crosses: truth)")


def render_gammas(in_path: Path, ax: plt.Axes) -> None:
    df = load_table("gammas", in_path)
    # diagonal cells first, then switches, grouped by age
    df = df.sort_values(["age_group", "k_prev", "k_curr"],
                        kind="stable").reset_index(drop=True)
    diag_first = pd.concat([df[df.k_prev == df.k_curr],
                            df[df.k_prev != df.k_curr]])
    x = np.arange(len(diag_first))
    colors = [occupation_color(int(k)) for k in diag_first.k_curr]
    ax.bar(x, diag_first.gamma_hat, color=colors, width=0.8)
    have_truth = diag_first.dropna(subset=["gamma_true"])
    ax.plot(x[: len(diag_first)][diag_first.gamma_true.notna().to_numpy()],
            have_truth.gamma_true, "x", color="black", ms=4, mew=1.2)
    ax.axhline(0.0, color="gray", lw=0.6)
    labels = [f"a{int(r.age_group)}:{int(r.k_prev)}→{int(r.k_curr)}"
              for r in diag_first.itertuples()]
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=90, fontsize=5)
    ax.set_ylabel("annual log-skill change")
    ax.set_title("Skill accumulation (bars: estimates, crosses: truth)")


def render_flows(in_path: Path, ax: plt.Axes) -> None:
    df = load_table("flows", in_path)
    pooled = df.groupby(["k_from", "k_to"])["count"].sum().unstack(fill_value=0)
    origins = pooled.index.to_numpy()
    switches = pooled.copy()
    for k in origins:
        if k in switches.columns:
            switches.loc[k, k] = 0
    bottoms = np.zeros(len(origins), dtype=float)
    for dest in switches.columns:
        vals = switches[dest].to_numpy(dtype=float)
        ax.bar(origins, vals, bottom=bottoms,
               color=occupation_color(int(dest)),
               label=f"to {int(dest)}", width=0.7)
        bottoms += vals
    ax.set_xticks(origins)
    ax.set_xlabel("origin occupation")
    ax.set_ylabel("switchers")
    ax.legend(frameon=False, fontsize=8)
    ax.set_title("Switcher composition by origin")


def render_hist(in_path: Path, ax: plt.Axes) -> None:
    df = load_table("hist", in_path)
    widths = (df.bin_hi - df.bin_lo).to_numpy()
    ax.bar(df.bin_lo, df["count"], width=widths, align="edge",
           color="#4c72b0", edgecolor="white", lw=0.3)
    ax.set_xlabel("annual log wage growth")
    ax.set_ylabel("workers")
    ax.set_title("Distribution of wage growth")


def render_quantiles(in_path: Path, ax: plt.Axes) -> None:
    df = load_table("quantiles", in_path)
    probs = sorted(df.prob.unique())
    cmap = plt.get_cmap("viridis")
    for i, p in enumerate(probs):
        grp = df[df.prob == p].sort_values("year")
        ax.plot(grp.year, grp.value, color=cmap(i / max(len(probs) - 1, 1)),
                lw=1.5, label=f"p{int(round(p * 100))}")
    ax.set_xlabel("year")
    ax.set_ylabel("log wage")
    ax.legend(frameon=False, fontsize=8)
    ax.set_title("Wage quantiles over time")


RENDERERS = {
    "prices": render_prices,
    "gammas": render_gammas,
    "flows": render_flows,
    "hist": render_hist,
    "quantiles": render_quantiles,
}


def render(kind: str, in_path: str | Path, out_path: str | Path,
           dpi: int = 150) -> Path:
    """Render one panel kind from its input CSV to an image file.

    The output is written only after the panel has been fully drawn, so a
    failed render never leaves a blank image behind.
    """
    if kind not in RENDERERS:
        raise KeyError(f"unknown panel kind {kind!r}; "
                       f"expected one of {sorted(RENDERERS)}")
    in_path, out_path = Path(in_path), Path(out_path)
    fig, ax = plt.subplots(figsize=(7, 4.5), constrained_layout=True)
    try:
        RENDERERS[kind](in_path, ax)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_path, dpi=dpi)
    finally:
        plt.close(fig)
    return out_path
