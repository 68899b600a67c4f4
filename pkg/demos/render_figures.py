"""Run one scenario end to end and render all five figure panels.

Requires the companion `royfig` package (see figures/).

Usage: python demos/render_figures.py [out_dir]
"""

import os
import sys
from pathlib import Path

from royfig import render

from roylab import builtin_scenarios, run_experiment


def main() -> None:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "runs")
    scenario = builtin_scenarios()["no-shocks"]
    run_experiment(scenario, out, profile="desk",
                   threads=min(os.cpu_count() or 1, 8))
    base = out / scenario.name
    inputs = {
        "prices": base / "ols" / "prices.csv",
        "gammas": base / "ols" / "gammas.csv",
        "flows": base / "descriptives" / "flows.csv",
        "hist": base / "descriptives" / "growth_hist.csv",
        "quantiles": base / "descriptives" / "quantiles.csv",
    }
    fig_dir = out / "figures"
    for kind, path in inputs.items():
        target = render(kind, path, fig_dir / f"{kind}.png")
        print("wrote", target)


if __name__ == "__main__":
    main()
