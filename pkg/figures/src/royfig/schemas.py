"""Input CSV schemas and validation.

The renderer consumes only the published CSV outputs of the simulation
engine; each panel kind maps to one schema here.  Validation names the
first offending column so batch scripts can report actionable errors.
"""

from pathlib import Path

import pandas as pd

SCHEMAS: dict[str, list[str]] = {
    "prices": ["year", "k", "dpi", "pi_cum", "truth_dpi", "truth_pi"],
    "gammas": ["age_group", "k_prev", "k_curr", "gamma_hat", "gamma_true",
               "sigma_gamma"],
    "flows": ["year_pair", "k_from", "k_to", "count"],
    "hist": ["bin_lo", "bin_hi", "count"],
    "quantiles": ["year", "prob", "value"],
}

PANEL_KINDS = tuple(SCHEMAS)


class SchemaError(ValueError):
    """Input table does not match the expected layout."""


def load_table(kind: str, path: str | Path) -> pd.DataFrame:
    """Read and validate one input CSV for the given panel kind."""
    expected = SCHEMAS[kind]
    df = pd.read_csv(path)
    for col in expected:
        if col not in df.columns:
            raise SchemaError(f"{path}: missing column {col!r} "
                              f"(expected {expected})")
    extra = [c for c in df.columns if c not in expected]
    if extra:
        raise SchemaError(f"{path}: unexpected column {extra[0]!r} "
                          f"(expected {expected})")
    if len(df) == 0:
        raise SchemaError(f"{path}: no data rows")
    return df[expected]
