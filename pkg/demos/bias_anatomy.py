"""Show the selection bias on one simulated panel and how IV removes it.

Simulates a single moderate-shock repetition, runs the first-difference OLS
and the lag-instrumented 2SLS, and prints the diagonal accumulation
estimates next to the truth.
"""

from roylab import builtin_scenarios, estimate, flatten, simulate_careers
from roylab.scenarios import (PROFILES, default_frame, default_grouping,
                              default_occupations)


def main() -> None:
    frame = default_frame()
    grouping = default_grouping()
    occs = default_occupations()
    scenario = builtin_scenarios()["moderate-shocks"]
    params = scenario.parameters(frame)

    careers = simulate_careers(scenario.seed_config(PROFILES["desk"]), params,
                               frame, grouping, occs, seed=scenario.base_seed)
    panel = flatten(careers, frame, grouping)
    print(f"panel: {panel.n_rows} wage-growth rows")

    results = {m: estimate(panel, m, frame, grouping, occs)
               for m in ("ols", "iv")}
    print(f"\n{'cell':<12} {'truth':>8} {'ols':>8} {'iv':>8}")
    for a in range(grouping.n_groups):
        for k in range(occs.K):
            truth = params.gamma[a, k, k]
            row = [results[m].gamma_matrix(grouping, occs.K)[0][a, k, k]
                   for m in ("ols", "iv")]
            print(f"a={a} k={k}->{k} {truth:>8.4f} {row[0]:>8.4f} "
                  f"{row[1]:>8.4f}")
    print("\nOLS overshoots the diagonal (stayers select on good shocks); "
          "IV lands on target.")


if __name__ == "__main__":
    main()
