"""Run every builtin scenario at desk scale and print a metric summary.

Usage: python demos/run_grid.py [out_dir]
Takes a few minutes with the default thread count.
"""

import os
import sys

from roylab import run_many


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "runs"
    threads = min(os.cpu_count() or 1, 8)
    reports = run_many(None, out, profile="desk", threads=threads)
    print(f"{'scenario':<26} {'method':<10} {'price MAE':>10} {'diag MAE':>10}")
    for name, report in reports.items():
        for method, m in report["metrics"].items():
            print(f"{name:<26} {method:<10} {m['price_mae']:>10.5f} "
                  f"{m['gamma_diag_mae']:>10.5f}")


if __name__ == "__main__":
    main()
