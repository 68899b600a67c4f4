"""Simulated occupation panels and skill-price estimation."""

from .dgp import (SeedConfig, draw_latent_skills, gamma_from_table,
                  simulate_careers, truncated_normal)
from .estimators import EstimateSet, estimate
from .experiment import run_experiment, run_many
from .panel import (AgeGrouping, Career, OccupationSet, PanelDataset,
                    ParameterSet, ShockLaw, TimeFrame, flatten,
                    panel_from_frames)
from .scenarios import PROFILES, Scenario, builtin_scenarios

__version__ = "0.1.0"

__all__ = [
    "AgeGrouping", "Career", "EstimateSet", "OccupationSet", "PROFILES",
    "PanelDataset", "ParameterSet", "Scenario", "SeedConfig", "ShockLaw",
    "TimeFrame", "builtin_scenarios", "draw_latent_skills", "estimate",
    "flatten", "gamma_from_table", "panel_from_frames", "run_experiment",
    "run_many", "simulate_careers", "truncated_normal",
]
