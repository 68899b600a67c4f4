"""Built-in scenario catalogue and the truth parameters behind it.

The accumulation table is an administrative-data style profile of annual
log-wage growth by origin occupation, destination occupation, and age
group.  Off-diagonal cells are scaled down per scenario to control how
much cross-occupation accumulation the truth carries.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dgp import SeedConfig, gamma_from_table
from .panel import (AgeGrouping, OccupationSet, ParameterSet, ShockLaw,
                    TimeFrame)

# Annual accumulation by (age group, origin, destination); occupation order
# Mgr-Prof-Tech, Sales-Office, Prod-Op-Crafts, Srvc-Care.
ACCUMULATION_TABLE = np.array([
    [[0.024, 0.0945, 0.0345, -0.012],
     [0.132, 0.022, 0.084, 0.015],
     [0.1125, 0.054, 0.010, -0.0255],
     [0.1485, 0.135, 0.159, 0.0095]],
    [[0.008, 0.0135, -0.0165, -0.054],
     [0.0405, 0.008, 0.0285, -0.051],
     [0.063, 0.033, 0.004, -0.021],
     [0.0945, 0.072, 0.1125, 0.0025]],
    [[0.0015, -0.015, -0.033, -0.006],
     [0.0135, 0.0005, -0.012, -0.036],
     [0.0315, 0.000, -0.0135, -0.0135],
     [0.0615, 0.0225, 0.0555, -0.0055]],
])

# Skill-price truth: flat levels through the pre-period, then linear drift.
PRICE_BASE_LEVELS = np.array([0.25, 0.05, 0.0, -0.25])
PRICE_DRIFTS = np.array([0.006, 0.002, -0.004, 0.001])

DEFAULT_BASE_SEED = 2718


def truth_prices(frame: TimeFrame, base_levels=PRICE_BASE_LEVELS,
                 drifts=PRICE_DRIFTS) -> np.ndarray:
    n = frame.n_years
    prices = np.tile(np.asarray(base_levels, dtype=float), (n, 1))
    base_idx = frame.base_end - frame.first_year
    for i in range(base_idx + 1, n):
        prices[i] = prices[i - 1] + drifts
    return prices


@dataclass(frozen=True)
class Profile:
    name: str
    n_workers: int
    n_reps: int


PROFILES = {
    "desk": Profile("desk", 5000, 20),
    "paper": Profile("paper", 50000, 100),
}


@dataclass(frozen=True)
class Scenario:
    """One truth configuration plus the estimators it is meant to stress."""

    name: str
    description: str
    sigma_multiplier: float = 0.0
    rho: float = 0.0
    switch_cost: float = 0.0
    additive_switch_cost: bool = False
    cross_scale: float = 1.0 / 3.0
    amenity_trend: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    estimators: tuple[str, ...] = ("ols",)
    base_seed: int = DEFAULT_BASE_SEED

    def parameters(self, frame: TimeFrame) -> ParameterSet:
        return ParameterSet(
            prices=truth_prices(frame),
            gamma=gamma_from_table(ACCUMULATION_TABLE, self.cross_scale),
            shock_law=ShockLaw(family="gaussian",
                               sigma_multiplier=self.sigma_multiplier,
                               rho=self.rho),
            switch_cost=self.switch_cost,
            additive_switch_cost=self.additive_switch_cost,
            amenity_trend=np.asarray(self.amenity_trend, dtype=float),
        )

    def seed_config(self, profile: Profile) -> SeedConfig:
        return SeedConfig(n_workers=profile.n_workers, seed=self.base_seed)

    def with_overrides(self, **kwargs) -> "Scenario":
        return replace(self, **kwargs)


def builtin_scenarios() -> dict[str, Scenario]:
    """The standard experiment grid, keyed by scenario name.

    All scenarios share one base seed, so pairs that differ in a single
    knob (for instance the switching cost) see identical shock draws and
    can be compared path by path.
    """
    items = [
        Scenario("no-shocks",
                 "Deterministic skills; every estimator should be exact.",
                 sigma_multiplier=0.0,
                 estimators=("ols", "fe", "fe-nobase")),
        Scenario("moderate-shocks",
                 "Half-reference shock scale; selection bias appears.",
                 sigma_multiplier=0.5,
                 estimators=("ols", "iv", "fe")),
        Scenario("vlarge-shocks",
                 "1.5x reference shock scale; strong selection on shocks.",
                 sigma_multiplier=1.5,
                 estimators=("ols", "iv", "fe")),
        Scenario("persistent-shocks",
                 "AR(1) shocks with rho=0.3 at half-reference scale.",
                 sigma_multiplier=0.5, rho=0.3,
                 estimators=("ols", "iv")),
        Scenario("switch-costs-no-shocks",
                 "Pure switching cost, full cross accumulation, no shocks.",
                 sigma_multiplier=0.0, switch_cost=0.05, cross_scale=1.0,
                 estimators=("ols",)),
        Scenario("moderate-switch-costs",
                 "Switching cost 5 percent with moderate shocks.",
                 sigma_multiplier=0.5, switch_cost=0.05,
                 estimators=("ols", "iv")),
        Scenario("high-switch-costs",
                 "Switching cost 20 percent with very large shocks.",
                 sigma_multiplier=1.5, switch_cost=0.2,
                 estimators=("ols", "iv")),
        Scenario("trends-amenities",
                 "Trending amenity in the first occupation, moderate shocks.",
                 sigma_multiplier=0.5,
                 amenity_trend=(0.02, 0.0, 0.0, 0.0),
                 estimators=("ols", "amenity")),
    ]
    return {s.name: s for s in items}


def default_frame() -> TimeFrame:
    return TimeFrame(1975, 2010, 1984)


def default_grouping() -> AgeGrouping:
    return AgeGrouping()


def default_occupations() -> OccupationSet:
    return OccupationSet()
