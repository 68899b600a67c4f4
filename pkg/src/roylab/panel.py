"""Core domain types shared by the simulator and the estimators.

Everything here is immutable after construction and safe to share across
worker threads.  The central operation is :func:`flatten`, which turns a list
of simulated careers into the stacked observation arrays the estimators
consume (a first-difference view and a levels view with occupation-stint
identifiers).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

DEFAULT_LABELS = ("Mgr-Prof-Tech", "Sales-Office", "Prod-Op-Crafts", "Srvc-Care")


class MalformedCareerError(ValueError):
    """Raised when a career violates the consecutive-years contract."""


@dataclass(frozen=True)
class OccupationSet:
    """Ordered occupation labels plus the omitted reference occupation."""

    labels: tuple[str, ...] = DEFAULT_LABELS
    reference_index: int = 2  # Prod-Op-Crafts

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValueError("need at least two occupations")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("occupation labels must be unique")
        if not 0 <= self.reference_index < len(self.labels):
            raise ValueError("reference_index out of range")

    @property
    def K(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class AgeGrouping:
    """Inclusive age intervals partitioning the working life."""

    bounds: tuple[tuple[int, int], ...] = ((25, 34), (35, 44), (45, 54))
    entry_age: int = 25
    exit_age: int = 54

    def __post_init__(self):
        lo = self.entry_age
        for a, b in self.bounds:
            if a != lo or b < a:
                raise ValueError("age intervals must partition [entry_age, exit_age]")
            lo = b + 1
        if lo != self.exit_age + 1:
            raise ValueError("age intervals must end at exit_age")

    @property
    def n_groups(self) -> int:
        return len(self.bounds)

    def group_of(self, age):
        """Index of the interval containing ``age`` (scalar or array)."""
        ages = np.asarray(age)
        if np.any(ages < self.entry_age) or np.any(ages > self.exit_age):
            raise ValueError(f"age out of range [{self.entry_age}, {self.exit_age}]")
        uppers = np.array([b for _, b in self.bounds])
        out = np.searchsorted(uppers, ages, side="left")
        return int(out) if np.isscalar(age) else out


@dataclass(frozen=True)
class TimeFrame:
    """Calendar years covered by the panel and the constant-price base period."""

    first_year: int = 1975
    last_year: int = 2010
    base_end: int = 1984

    def __post_init__(self):
        if not self.first_year <= self.base_end < self.last_year:
            raise ValueError("need first_year <= base_end < last_year")

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.first_year, self.last_year + 1)

    @property
    def n_years(self) -> int:
        return self.last_year - self.first_year + 1

    @property
    def analysis_years(self) -> np.ndarray:
        return np.arange(self.base_end + 1, self.last_year + 1)

    def year_index(self, year):
        return np.asarray(year) - self.first_year


@dataclass(frozen=True)
class ShockLaw:
    """Law of the idiosyncratic skill shocks.

    ``sigma_ref`` is the reference standard deviation of annual log wage
    growth that the multiplier scales; the 0.15 default is a configuration
    stand-in, not an estimate.  ``rho`` makes shocks AR(1) with the stated
    innovation scale.
    """

    family: str = "gaussian"  # none | gaussian | empirical
    sigma_multiplier: float = 0.0
    sigma_ref: float = 0.12
    rho: float = 0.0
    empirical_sample: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in ("none", "gaussian", "empirical"):
            raise ValueError(f"unknown shock family {self.family!r}")
        if self.sigma_multiplier < 0:
            raise ValueError("sigma_multiplier must be >= 0")
        if not 0 <= self.rho < 1:
            raise ValueError("rho must be in [0, 1)")
        if self.family == "none":
            object.__setattr__(self, "sigma_multiplier", 0.0)
        if self.family == "empirical" and not self.empirical_sample:
            raise ValueError("empirical shock family needs empirical_sample")

    @property
    def sigma(self) -> float:
        return self.sigma_multiplier * self.sigma_ref


@dataclass(frozen=True)
class ParameterSet:
    """The data-generating truth.

    prices        -- (n_years, K) log skill prices by calendar year
    gamma         -- (n_age_groups, K, K) mean log-skill change, indexed by
                     previous-period age group, previous occupation, and
                     destination occupation
    switch_cost   -- utility fraction lost when switching (multiplicative
                     convention; ``additive_switch_cost`` flips to a flat
                     utility deduction)
    amenity_trend -- (K,) annual amenity change applied for years > base_end
    """

    prices: np.ndarray
    gamma: np.ndarray
    shock_law: ShockLaw = ShockLaw()
    switch_cost: float = 0.0
    additive_switch_cost: bool = False
    amenity_trend: np.ndarray = field(default_factory=lambda: np.zeros(4))
    amenity_dispersion: float = 0.0
    initial_skill_scale: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "prices", np.asarray(self.prices, dtype=float))
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=float))
        object.__setattr__(self, "amenity_trend", np.asarray(self.amenity_trend, dtype=float))
        if self.switch_cost < 0:
            raise ValueError("switch_cost must be >= 0")
        if not np.all(np.isfinite(self.gamma)):
            raise ValueError("gamma must be finite")

    def validate(self, frame: TimeFrame, occs: OccupationSet, grouping: AgeGrouping) -> None:
        K = occs.K
        if self.prices.shape != (frame.n_years, K):
            raise ValueError("prices must have shape (n_years, K)")
        if self.gamma.shape != (grouping.n_groups, K, K):
            raise ValueError("gamma must have shape (n_age_groups, K, K)")
        base = self.prices[: frame.base_end - frame.first_year + 1]
        if not np.allclose(base, base[0][None, :]):
            raise ValueError("prices must be constant during the base period")
        if self.amenity_trend.shape != (K,):
            raise ValueError("amenity_trend must have length K")
        if self.amenity_trend[occs.reference_index] != 0.0:
            raise ValueError("amenity_trend must be zero for the reference occupation")


@dataclass(frozen=True)
class Career:
    """One worker's simulated trajectory over consecutive calendar years."""

    worker_id: int
    entry_year: int
    entry_age: int
    years: np.ndarray       # (T,)
    ages: np.ndarray        # (T,)
    choices: np.ndarray     # (T,) occupation index per year
    skills: np.ndarray      # (T, K) latent skills in all occupations
    shocks: np.ndarray      # (T, K) realized idiosyncratic shocks
    amenities: np.ndarray   # (T,) amenity value of the chosen occupation
    wages: np.ndarray       # (T,) realized log wage

    def __len__(self) -> int:
        return len(self.years)


DIFF_COLUMNS = ["worker_id", "year", "age", "k_prev", "k_curr", "dlogw"]
LEVEL_COLUMNS = ["worker_id", "year", "k", "logw", "stint_id", "tenure"]


@dataclass(frozen=True)
class PanelDataset:
    """Stacked observations: a first-difference view and a levels view.

    First-difference arrays carry one row per worker per consecutive year
    pair; ``age`` refers to the previous period (the age that indexes the
    accumulation function).  ``lag2``/``lag3`` hold the choices two and three
    years before the current one, or -1 where not observed.
    """

    worker_id: np.ndarray
    year: np.ndarray
    age: np.ndarray            # age at t-1
    age_group: np.ndarray
    k_prev: np.ndarray
    k_curr: np.ndarray
    dlogw: np.ndarray
    lag2: np.ndarray
    lag3: np.ndarray

    lv_worker_id: np.ndarray
    lv_year: np.ndarray
    lv_age: np.ndarray
    lv_k: np.ndarray
    lv_logw: np.ndarray
    lv_stint_id: np.ndarray
    lv_tenure: np.ndarray

    @property
    def n_rows(self) -> int:
        return len(self.dlogw)

    @property
    def n_level_rows(self) -> int:
        return len(self.lv_logw)

    def diff_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "worker_id": self.worker_id, "year": self.year, "age": self.age,
            "k_prev": self.k_prev, "k_curr": self.k_curr, "dlogw": self.dlogw,
        })

    def levels_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "worker_id": self.lv_worker_id, "year": self.lv_year, "k": self.lv_k,
            "logw": self.lv_logw, "stint_id": self.lv_stint_id, "tenure": self.lv_tenure,
        })


def flatten(careers: list[Career], frame: TimeFrame,
            grouping: AgeGrouping | None = None) -> PanelDataset:
    """Stack careers into first-difference and levels observation arrays.

    Stint ids are assigned by a single scan of each career: a new stint
    starts at career entry and at every consecutive-year occupation change,
    so re-entering an occupation after a spell elsewhere opens a fresh stint.
    """
    grouping = grouping or AgeGrouping()
    d_wid, d_year, d_age, d_kp, d_kc, d_dw, d_l2, d_l3 = [], [], [], [], [], [], [], []
    l_wid, l_year, l_age, l_k, l_w, l_stint, l_ten = [], [], [], [], [], [], []

    next_stint = 0
    for c in careers:
        T = len(c)
        if T == 0:
            continue
        if np.any(np.diff(c.years) != 1) or np.any(np.diff(c.ages) != 1):
            raise MalformedCareerError(f"worker {c.worker_id}: years must be consecutive")
        if c.years[-1] > frame.last_year or c.years[0] < frame.first_year:
            raise MalformedCareerError(f"worker {c.worker_id}: outside the time frame")

        switches = np.flatnonzero(np.diff(c.choices) != 0) + 1
        starts = np.concatenate(([0], switches))
        stint = np.zeros(T, dtype=np.int64)
        stint[starts] = 1
        stint = np.cumsum(stint) - 1 + next_stint
        next_stint = stint[-1] + 1
        lengths = np.diff(np.concatenate((starts, [T])))
        tenure = np.arange(T) - np.repeat(starts, lengths)

        l_wid.append(np.full(T, c.worker_id, dtype=np.int64))
        l_year.append(c.years.astype(np.int64))
        l_age.append(c.ages.astype(np.int64))
        l_k.append(c.choices.astype(np.int64))
        l_w.append(c.wages.astype(float))
        l_stint.append(stint)
        l_ten.append(tenure)

        if T >= 2:
            d_wid.append(np.full(T - 1, c.worker_id, dtype=np.int64))
            d_year.append(c.years[1:].astype(np.int64))
            d_age.append(c.ages[:-1].astype(np.int64))
            d_kp.append(c.choices[:-1].astype(np.int64))
            d_kc.append(c.choices[1:].astype(np.int64))
            d_dw.append(np.diff(c.wages).astype(float))
            lag2 = np.full(T - 1, -1, dtype=np.int64)
            lag2[1:] = c.choices[:-2]
            lag3 = np.full(T - 1, -1, dtype=np.int64)
            lag3[2:] = c.choices[:-3]
            d_l2.append(lag2)
            d_l3.append(lag3)

    def cat(parts, dtype):
        return np.concatenate(parts) if parts else np.empty(0, dtype=dtype)

    age = cat(d_age, np.int64)
    return PanelDataset(
        worker_id=cat(d_wid, np.int64), year=cat(d_year, np.int64), age=age,
        age_group=grouping.group_of(age) if len(age) else np.empty(0, np.int64),
        k_prev=cat(d_kp, np.int64), k_curr=cat(d_kc, np.int64),
        dlogw=cat(d_dw, float), lag2=cat(d_l2, np.int64), lag3=cat(d_l3, np.int64),
        lv_worker_id=cat(l_wid, np.int64), lv_year=cat(l_year, np.int64),
        lv_age=cat(l_age, np.int64), lv_k=cat(l_k, np.int64), lv_logw=cat(l_w, float),
        lv_stint_id=cat(l_stint, np.int64), lv_tenure=cat(l_ten, np.int64),
    )


def panel_from_frames(diff: pd.DataFrame, levels: pd.DataFrame | None,
                      grouping: AgeGrouping | None = None) -> PanelDataset:
    """Rebuild a PanelDataset from the serialized CSV views.

    Lagged choices are reconstructed by chaining consecutive difference rows
    within a worker; where the chain is broken the lag is left unobserved.
    """
    grouping = grouping or AgeGrouping()
    diff = diff.sort_values(["worker_id", "year"], kind="stable").reset_index(drop=True)
    wid = diff["worker_id"].to_numpy(np.int64)
    year = diff["year"].to_numpy(np.int64)
    k_prev = diff["k_prev"].to_numpy(np.int64)
    k_curr = diff["k_curr"].to_numpy(np.int64)

    n = len(diff)
    lag2 = np.full(n, -1, dtype=np.int64)
    lag3 = np.full(n, -1, dtype=np.int64)
    prev1 = np.empty(n, dtype=bool)
    prev1[:1] = False
    prev1[1:] = (wid[1:] == wid[:-1]) & (year[1:] == year[:-1] + 1)
    lag2[prev1] = k_prev[np.flatnonzero(prev1) - 1]
    prev2 = np.zeros(n, dtype=bool)
    prev2[1:] = prev1[1:] & prev1[:-1]
    lag3[prev2] = k_prev[np.flatnonzero(prev2) - 2]

    age = diff["age"].to_numpy(np.int64)
    if levels is not None:
        levels = levels.sort_values(["worker_id", "year"], kind="stable")
        if "age" in levels:
            lv_age = levels["age"].to_numpy(np.int64)
        else:
            # Recover ages from the difference rows: a diff row at year t
            # carries the age at t-1, so age(t) = diff.age + 1 and the entry
            # year's age comes from the worker's first diff row.
            by_curr = pd.Series(age + 1, index=pd.MultiIndex.from_arrays([wid, year]))
            by_prev = pd.Series(age, index=pd.MultiIndex.from_arrays([wid, year - 1]))
            lookup = pd.concat([by_curr, by_prev[~by_prev.index.isin(by_curr.index)]])
            lookup = lookup[~lookup.index.duplicated()]
            key = pd.MultiIndex.from_arrays(
                [levels["worker_id"].to_numpy(np.int64), levels["year"].to_numpy(np.int64)])
            lv_age = lookup.reindex(key).fillna(0).to_numpy(np.int64)
        lv = dict(
            lv_worker_id=levels["worker_id"].to_numpy(np.int64),
            lv_year=levels["year"].to_numpy(np.int64),
            lv_age=lv_age,
            lv_k=levels["k"].to_numpy(np.int64),
            lv_logw=levels["logw"].to_numpy(float),
            lv_stint_id=levels["stint_id"].to_numpy(np.int64),
            lv_tenure=levels["tenure"].to_numpy(np.int64),
        )
    else:
        lv = {k: np.empty(0, np.int64 if k != "lv_logw" else float)
              for k in ("lv_worker_id", "lv_year", "lv_age", "lv_k", "lv_logw",
                        "lv_stint_id", "lv_tenure")}
    return PanelDataset(
        worker_id=wid, year=year, age=age, age_group=grouping.group_of(age),
        k_prev=k_prev, k_curr=k_curr, dlogw=diff["dlogw"].to_numpy(float),
        lag2=lag2, lag3=lag3, **lv,
    )
