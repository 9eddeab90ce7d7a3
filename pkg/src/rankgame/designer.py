"""Designer side: how much tune-before-test is needed to stabilize a leaderboard."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .cost import inverse_cost
from .equilibrium import Status, overtake_effort, zero_effort_pne_check
from .game import DesignerPrefs, GameInstance
from .score import UNREACHABLE, ScoreParams

DEFAULT_HORIZON = 1e12


class NotStabilizable(RuntimeError):
    def __init__(self, ranks, horizon):
        self.ranks = list(ranks)
        self.horizon = horizon
        super().__init__(
            f"no tune-before-test level up to {horizon:g} stabilizes rank(s) {self.ranks}"
        )


@dataclass(frozen=True)
class ClimbingCostCurve:
    tbt_grid: tuple
    min_effort: tuple  # None where every overtake is unreachable
    argmin_rank: tuple

    @property
    def saturated(self):
        return tuple(v is None for v in self.min_effort)


def climbing_cost_curve(game: GameInstance, tbt_grid: Sequence[float]) -> ClimbingCostCurve:
    """Cheapest adjacent overtake across ranks at each tune-before-test level."""
    grid = [float(d) for d in tbt_grid]
    if any(d < 0 for d in grid) or any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("tbt grid must be nonnegative and sorted ascending")
    values, ranks = [], []
    for delta in grid:
        best, best_r = None, None
        for r in range(2, game.n + 1):
            e = overtake_effort(game.scores, r, delta)
            if e is UNREACHABLE:
                continue
            if best is None or e < best:
                best, best_r = e, r
        values.append(best)
        ranks.append(best_r)
    return ClimbingCostCurve(tuple(grid), tuple(values), tuple(ranks))


def rule_of_thumb_threshold(e_req_zero: float, gamma: float, rho: float) -> float:
    """Conservative power-law estimate ``max(0, (rho / (e0 + 1))**gamma - 1)``."""
    if not (e_req_zero >= 0 and rho > 0 and 0 < gamma <= 1):
        raise ValueError("need e_req_zero >= 0, rho > 0 and 0 < gamma <= 1")
    return max(0.0, (rho / (e_req_zero + 1.0)) ** gamma - 1.0)


def simplified_threshold(e_req_zero: float, gamma: float, rho: float) -> float:
    """The back-of-envelope variant ``(rho / e0)**gamma``, i.e. ``lambda**gamma``."""
    if not (e_req_zero > 0 and rho > 0 and 0 < gamma <= 1):
        raise ValueError("need e_req_zero > 0, rho > 0 and 0 < gamma <= 1")
    return (rho / e_req_zero) ** gamma


@dataclass(frozen=True)
class PairThreshold:
    rank: int
    exact: Optional[float]  # None when not stabilizable within the horizon
    reward_gap: float
    rho: float
    e_req_zero: object  # float or UNREACHABLE
    gamma: Optional[float]
    lam: Optional[float]
    rule_of_thumb: Optional[float]
    simplified: Optional[float]
    marginal: bool

    @property
    def rule_of_thumb_agrees(self) -> Optional[bool]:
        """Exact and rule-of-thumb within a factor of 3 (checked only for
        effective incentives of at least 2)."""
        if self.lam is None or self.lam < 2 or self.exact is None or self.rule_of_thumb is None:
            return None
        lo, hi = sorted((self.exact, self.rule_of_thumb))
        if hi == 0:
            return True
        return lo > 0 and hi / lo <= 3.0


@dataclass(frozen=True)
class ThresholdReport:
    pairs: tuple
    horizon: float

    @property
    def unstabilizable(self):
        return [p.rank for p in self.pairs if p.exact is None]

    @property
    def global_threshold(self) -> Optional[float]:
        if self.unstabilizable:
            return None
        return max(p.exact for p in self.pairs)

    @property
    def hardest_rank(self) -> Optional[int]:
        if self.unstabilizable:
            return None
        return max(self.pairs, key=lambda p: (p.exact, -p.rank)).rank


def _condition(game: GameInstance, r: int, delta: float) -> float:
    """``c(e_r(delta)) - gap``; nonnegative when overtaking is unprofitable."""
    e = overtake_effort(game.scores, r, delta)
    if e is UNREACHABLE:
        return math.inf
    return game.cost(e) - game.rewards.gap(r)


def pair_threshold(
    game: GameInstance, r: int, tol: float = 1e-6, horizon: float = DEFAULT_HORIZON
) -> Optional[float]:
    """Smallest tune-before-test level at which rank ``r`` cannot profitably
    overtake rank ``r-1``, to absolute tolerance ``tol``; None past ``horizon``."""
    if _condition(game, r, 0.0) >= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while _condition(game, r, hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > horizon:
            return None
    while hi - lo > tol:
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            break
        if _condition(game, r, mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def _pair_report(game: GameInstance, r: int, tol: float, horizon: float) -> PairThreshold:
    gap = game.rewards.gap(r)
    exact = pair_threshold(game, r, tol, horizon)
    rho = inverse_cost(game.cost, gap)
    e0 = overtake_effort(game.scores, r, 0.0)
    hi, lo = game.scores.curves[r - 2], game.scores.curves[r - 1]
    gamma = lo.beta / hi.beta if isinstance(hi, ScoreParams) and isinstance(lo, ScoreParams) else None
    lam = rot = simp = None
    if e0 is not UNREACHABLE and math.isfinite(e0):
        lam = rho / e0 if e0 > 0 else math.inf
        if gamma is not None and 0 < gamma <= 1 and rho > 0:
            rot = rule_of_thumb_threshold(e0, gamma, rho)
            if e0 > 0:
                simp = simplified_threshold(e0, gamma, rho)
    marginal = False
    if exact is not None:
        c = _condition(game, r, exact)
        marginal = math.isfinite(c) and abs(c) < 1e-6 and exact == 0.0
    return PairThreshold(r, exact, gap, rho, e0, gamma, lam, rot, simp, marginal)


def _threads():
    try:
        return max(1, int(os.environ.get("RANKGAME_THREADS", "1")))
    except ValueError:
        return 1


def stabilizing_threshold(
    game: GameInstance,
    tol: float = 1e-6,
    horizon: float = DEFAULT_HORIZON,
    raise_on_failure: bool = False,
) -> ThresholdReport:
    """Per-pair and global stabilizing tune-before-test levels.

    The ``tbt`` already set on ``game`` is ignored.  Pairs are independent and
    may be computed on up to ``RANKGAME_THREADS`` threads; results are ordered
    by rank regardless.
    """
    ranks = range(2, game.n + 1)
    workers = min(_threads(), game.n - 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            pairs = list(pool.map(lambda r: _pair_report(game, r, tol, horizon), ranks))
    else:
        pairs = [_pair_report(game, r, tol, horizon) for r in ranks]
    report = ThresholdReport(tuple(pairs), horizon)
    if raise_on_failure and report.unstabilizable:
        raise NotStabilizable(report.unstabilizable, horizon)
    return report


def optimal_tbt(game: GameInstance, prefs: DesignerPrefs, **kwargs):
    """Cheapest stabilizing level and the designer's utility at the induced
    all-zero equilibrium, ``(delta, utility)``."""
    report = stabilizing_threshold(game, raise_on_failure=True, **kwargs)
    delta = report.global_threshold
    total_cost = game.n * prefs.tbt_cost(delta)
    if prefs.ranking_reward < total_cost:
        warnings.warn(
            f"ranking reward {prefs.ranking_reward:g} is below the total "
            f"tune-before-test cost {total_cost:g}",
            stacklevel=2,
        )
    return delta, prefs.ranking_reward - total_cost


def verify_monotone_stabilization(game: GameInstance, delta1: float, delta2: float) -> bool:
    """If the all-zero profile is an equilibrium at ``delta1`` it must remain
    one at any ``delta2 >= delta1``."""
    if delta2 < delta1:
        raise ValueError("need delta2 >= delta1")
    first = zero_effort_pne_check(game.with_tbt(delta1)).status
    if first is not Status.ALL_ZERO_PNE:
        return True
    return zero_effort_pne_check(game.with_tbt(delta2)).status is Status.ALL_ZERO_PNE
