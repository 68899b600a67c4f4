"""Seed-population synthesis and forward simulation of careers.

Workers enter either as a first-year cross-section with uniformly spread
ages or as annual entry-age cohorts, receive an initial wage in their seeded
occupation, and get latent skills in the other occupations drawn from a
truncated normal whose upper bound makes the seeded choice optimal.  Careers
are then rolled forward year by year: skills accumulate in every occupation
according to the accumulation tensor and the idiosyncratic shock law, and
each worker picks the occupation maximizing wage plus amenity, subject to a
switching penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .panel import AgeGrouping, Career, OccupationSet, ParameterSet, TimeFrame

COHORT_CROSS_SECTION = "cross-section"
COHORT_UNIFORM = "uniform"


@dataclass(frozen=True)
class SeedConfig:
    """How the seed population is synthesized."""

    n_workers: int = 5000
    occupation_shares: tuple[float, ...] = (0.22, 0.26, 0.34, 0.18)
    wage_means: tuple[float, ...] = (2.3, 2.1, 2.0, 1.8)
    wage_sds: tuple[float, ...] = (0.35, 0.35, 0.35, 0.35)
    cohort_scheme: str = COHORT_CROSS_SECTION
    seed: int = 0

    def __post_init__(self):
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        if abs(sum(self.occupation_shares) - 1.0) > 1e-9:
            raise ValueError("occupation shares must sum to 1")
        if self.cohort_scheme not in (COHORT_CROSS_SECTION, COHORT_UNIFORM):
            raise ValueError(f"unknown cohort scheme {self.cohort_scheme!r}")


@dataclass(frozen=True)
class AmenityState:
    """Amenity levels by year, cumulated from the annual trend."""

    levels: np.ndarray  # (n_years, K)
    dispersion: float = 0.0

    @classmethod
    def from_trend(cls, trend: np.ndarray, frame: TimeFrame,
                   dispersion: float = 0.0) -> "AmenityState":
        trend = np.asarray(trend, dtype=float)
        levels = np.zeros((frame.n_years, len(trend)))
        base_idx = frame.base_end - frame.first_year
        for i in range(base_idx + 1, frame.n_years):
            levels[i] = levels[i - 1] + trend
        return cls(levels=levels, dispersion=dispersion)


def decompose_initial_wage(w0: float, k0: int, year: int, prices: np.ndarray,
                           frame: TimeFrame) -> float:
    """Split an initial log wage into skill = wage minus the prevailing price."""
    return w0 - prices[frame.year_index(year), k0]


def truncated_normal(mean, scale, upper, rng: np.random.Generator) -> np.ndarray:
    """Draw from Normal(mean, scale) conditioned on being <= upper.

    Inverse-CDF construction, vectorized over the broadcast shape of the
    arguments.  The probability mass below the bound is floored to keep the
    transform finite for extreme bounds.
    """
    mean = np.asarray(mean, dtype=float)
    beta = (np.asarray(upper, dtype=float) - mean) / scale
    if not np.all(np.isfinite(beta)):
        raise ValueError("non-finite truncation bound")
    p = np.maximum(ndtr(beta), 1e-300)
    u = rng.uniform(size=np.broadcast(mean, beta).shape)
    draws = mean + scale * ndtri(u * p)
    return np.minimum(draws, np.asarray(upper, dtype=float))


def draw_latent_skills(s_k0, k0, year, prices: np.ndarray, scale: float,
                       rng: np.random.Generator, frame: TimeFrame) -> np.ndarray:
    """Latent skills in the non-chosen occupations for a batch of entrants.

    Each skill is truncated-normal with location ``s_k0 + pi_k0`` and upper
    bound ``s_k0 + pi_k0 - pi_k'``, so every potential wage is weakly below
    the wage in the seeded occupation.  Entries for the chosen occupation are
    returned as ``s_k0`` itself.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    s_k0 = np.atleast_1d(np.asarray(s_k0, dtype=float))
    k0 = np.atleast_1d(np.asarray(k0))
    yi = np.atleast_1d(frame.year_index(year))
    K = prices.shape[1]
    pi_k0 = prices[yi, k0]
    loc = (s_k0 + pi_k0)[:, None]
    bound = loc - prices[yi]
    skills = truncated_normal(np.broadcast_to(loc, bound.shape), scale, bound, rng)
    rows = np.arange(len(s_k0))
    skills[rows, k0] = s_k0
    return skills


def gamma_from_table(source: np.ndarray, cross_scale: float) -> np.ndarray:
    """Scale the off-diagonal entries of an accumulation table.

    Diagonal entries are copied; off-diagonal entries are multiplied by
    ``cross_scale``.
    """
    source = np.asarray(source, dtype=float)
    if source.ndim != 3 or source.shape[1] != source.shape[2]:
        raise ValueError("source must have shape (n_age_groups, K, K)")
    if not np.all(np.isfinite(source)):
        raise ValueError("accumulation table has missing cells")
    out = source * cross_scale
    idx = np.arange(source.shape[1])
    out[:, idx, idx] = source[:, idx, idx]
    return out


def _entry_schedule(seed_cfg: SeedConfig, frame: TimeFrame, grouping: AgeGrouping,
                    rng: np.random.Generator):
    """Entry year and age for every worker, per the configured cohort scheme.

    The cross-section scheme enters equal entry-age cohorts starting early
    enough that the oldest active workers in the observation window already
    carry a full simulated history; n_workers calibrates the cohort size so
    roughly that many careers are active in any given year.  The uniform
    scheme spreads entrants over the observation window only.
    """
    span = grouping.exit_age - grouping.entry_age + 1
    if seed_cfg.cohort_scheme == COHORT_CROSS_SECTION:
        first = frame.first_year - (span - 1)
        cohort = max(1, round(seed_cfg.n_workers / span))
        entry_year = np.repeat(np.arange(first, frame.last_year + 1), cohort)
    else:
        entry_year = rng.integers(frame.first_year, frame.last_year + 1,
                                  size=seed_cfg.n_workers)
        entry_year = np.sort(entry_year, kind="stable")
    entry_age = np.full(len(entry_year), grouping.entry_age)
    return entry_year.astype(np.int64), entry_age.astype(np.int64)


def _draw_innovations(shock_law, shape, rng: np.random.Generator) -> np.ndarray:
    if shock_law.sigma == 0.0:
        return np.zeros(shape)
    if shock_law.family == "empirical":
        sample = np.asarray(shock_law.empirical_sample, dtype=float)
        sample = (sample - sample.mean()) / sample.std()
        return shock_law.sigma * rng.choice(sample, size=shape)
    return rng.normal(0.0, shock_law.sigma, size=shape)


def simulate_careers(seed_cfg: SeedConfig, params: ParameterSet, frame: TimeFrame,
                     grouping: AgeGrouping, occs: OccupationSet,
                     seed: int | None = None) -> list[Career]:
    """Simulate the full panel of careers under the given truth.

    All random draws happen up front in a fixed order from a single
    generator, so identical (seed, config) pairs produce bit-identical
    careers regardless of how callers schedule repetitions.

    Cohorts entering before the observation window are simulated from their
    actual entry year (prices and amenities held at their base values there)
    and trimmed to the window afterwards, so the first observed year already
    reflects an established population rather than a cold start.
    """
    params.validate(frame, occs, grouping)
    K = occs.K
    rng = np.random.default_rng(np.random.SeedSequence(
        seed if seed is not None else seed_cfg.seed))

    entry_year, entry_age = _entry_schedule(seed_cfg, frame, grouping, rng)
    n = len(entry_year)
    shares = np.asarray(seed_cfg.occupation_shares)
    k0 = rng.choice(K, size=n, p=shares)
    w0 = rng.normal(np.asarray(seed_cfg.wage_means)[k0],
                    np.asarray(seed_cfg.wage_sds)[k0])

    pre = int(frame.first_year - min(int(entry_year.min()), frame.first_year))
    sim = TimeFrame(frame.first_year - pre, frame.last_year, frame.base_end)
    prices = np.vstack([np.tile(params.prices[0], (pre, 1)), params.prices])

    entry_idx = sim.year_index(entry_year)
    s_k0 = w0 - prices[entry_idx, k0]
    skills0 = draw_latent_skills(s_k0, k0, entry_year, prices,
                                 params.initial_skill_scale, rng, sim)
    innov = _draw_innovations(params.shock_law, (n, sim.n_years, K), rng)
    base_state = AmenityState.from_trend(params.amenity_trend, frame,
                                         params.amenity_dispersion)
    amenity = AmenityState(
        levels=np.vstack([np.tile(base_state.levels[0], (pre, 1)),
                          base_state.levels]),
        dispersion=base_state.dispersion)
    if amenity.dispersion > 0:
        idio = rng.normal(0.0, amenity.dispersion, size=(n, sim.n_years, K))
    else:
        idio = None

    exit_year = np.minimum(entry_year + (grouping.exit_age - entry_age),
                           frame.last_year)
    lengths = exit_year - entry_year + 1

    # Year-by-year state, recorded into per-worker slots afterwards.
    skills = skills0.copy()
    shock_state = np.zeros((n, K))
    choice = k0.copy()

    rec_choice = np.zeros((n, sim.n_years), dtype=np.int64)
    rec_skills = np.zeros((n, sim.n_years, K))
    rec_shocks = np.zeros((n, sim.n_years, K))
    rec_amen = np.zeros((n, sim.n_years))
    rec_wage = np.zeros((n, sim.n_years))

    first_idx = entry_idx
    rec_choice[np.arange(n), first_idx] = k0
    rec_skills[np.arange(n), first_idx] = skills
    rec_wage[np.arange(n), first_idx] = w0
    rec_amen[np.arange(n), first_idx] = amenity.levels[first_idx, k0]
    if idio is not None:
        rec_amen[np.arange(n), first_idx] += idio[np.arange(n), first_idx, k0]

    rho = params.shock_law.rho
    c = params.switch_cost
    for yi in range(1, sim.n_years):
        year = sim.first_year + yi
        active = (entry_year < year) & (year <= exit_year)
        if not np.any(active):
            continue
        idx = np.flatnonzero(active)
        age_prev = entry_age[idx] + (year - 1 - entry_year[idx])
        a = grouping.group_of(age_prev)
        k_prev = choice[idx]

        u = rho * shock_state[idx] + innov[idx, yi]
        shock_state[idx] = u
        skills[idx] += params.gamma[a, k_prev, :] + u

        potential = prices[yi][None, :] + skills[idx]
        util = potential + amenity.levels[yi][None, :]
        if idio is not None:
            util = util + idio[idx, yi]
        if c > 0:
            if params.additive_switch_cost:
                penalized = util - c
            else:
                penalized = (1.0 - c) * util
            stay = util[np.arange(len(idx)), k_prev]
            util = penalized
            util[np.arange(len(idx)), k_prev] = stay

        best = util.max(axis=1)
        k_new = np.where(util[np.arange(len(idx)), k_prev] >= best,
                         k_prev, util.argmax(axis=1))

        choice[idx] = k_new
        rec_choice[idx, yi] = k_new
        rec_skills[idx, yi] = skills[idx]
        rec_shocks[idx, yi] = u
        amen_used = amenity.levels[yi][k_new]
        if idio is not None:
            amen_used = amen_used + idio[idx, yi, k_new]
        rec_amen[idx, yi] = amen_used
        rec_wage[idx, yi] = potential[np.arange(len(idx)), k_new]

    careers = []
    years_axis = sim.years
    for i in range(n):
        # trim pre-window history; drop careers that ended before the window
        lo = max(entry_idx[i], pre)
        hi = entry_idx[i] + lengths[i]
        if hi <= lo:
            continue
        age_lo = int(entry_age[i] + (lo - entry_idx[i]))
        careers.append(Career(
            worker_id=i,
            entry_year=int(years_axis[lo]),
            entry_age=age_lo,
            years=years_axis[lo:hi].copy(),
            ages=np.arange(age_lo, age_lo + (hi - lo)),
            choices=rec_choice[i, lo:hi].copy(),
            skills=rec_skills[i, lo:hi].copy(),
            shocks=rec_shocks[i, lo:hi].copy(),
            amenities=rec_amen[i, lo:hi].copy(),
            wages=rec_wage[i, lo:hi].copy(),
        ))
    return careers
