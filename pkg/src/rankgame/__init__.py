"""Ranking games on benchmark leaderboards with tune-before-test."""

__version__ = "0.1.0"

from .cost import LinearCost, PiecewiseLinearCost, PowerCost, inverse_cost, reparametrize_effort
from .designer import (
    NotStabilizable,
    climbing_cost_curve,
    optimal_tbt,
    rule_of_thumb_threshold,
    simplified_threshold,
    stabilizing_threshold,
)
from .equilibrium import (
    Status,
    best_response_dynamics,
    brute_force_grid_verdict,
    just_overtake_effort,
    pne_verdict,
    zero_effort_pne_check,
)
from .fitting import DataError, fit_trajectory, pair_statistics
from .game import (
    CapabilityProfile,
    DesignerPrefs,
    EffortProfile,
    GameInstance,
    RewardScheme,
)
from .score import UNREACHABLE, CustomScore, ScoreModel, ScoreParams, required_effort

__all__ = [
    "UNREACHABLE",
    "CapabilityProfile",
    "CustomScore",
    "DataError",
    "DesignerPrefs",
    "EffortProfile",
    "GameInstance",
    "LinearCost",
    "NotStabilizable",
    "PiecewiseLinearCost",
    "PowerCost",
    "RewardScheme",
    "ScoreModel",
    "ScoreParams",
    "Status",
    "best_response_dynamics",
    "brute_force_grid_verdict",
    "climbing_cost_curve",
    "fit_trajectory",
    "inverse_cost",
    "just_overtake_effort",
    "optimal_tbt",
    "pair_statistics",
    "pne_verdict",
    "reparametrize_effort",
    "required_effort",
    "rule_of_thumb_threshold",
    "simplified_threshold",
    "stabilizing_threshold",
    "zero_effort_pne_check",
]
