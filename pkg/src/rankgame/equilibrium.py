"""Pure-strategy equilibria of the follower game.

The analytic side checks whether any model can profitably "just overtake" the
model ranked directly above it at the all-zero effort profile; under the score
regularity conditions that profile is the only equilibrium candidate, so a
profitable adjacent overtake rules out equilibria altogether.

The grid side (:func:`brute_force_grid_verdict`, :func:`best_response_dynamics`)
works on discretized efforts and never uses that characterization; it serves
as an independent check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cost import inverse_cost
from .game import EffortProfile, GameInstance, realized_scores
from .score import (
    UNREACHABLE,
    Effort,
    RegularityReport,
    ScoreModel,
    check_regularity,
    default_regularity_grids,
)

MARGINAL_TOL = 1e-6


class Status(str, enum.Enum):
    ALL_ZERO_PNE = "AllZeroPNE"
    NO_PNE = "NoPNE"


class RegularityError(ValueError):
    """The score curves failed the sampled regularity checks."""

    def __init__(self, report: RegularityReport):
        self.report = report
        counts = (
            len(report.c1_violations),
            len(report.c2_violations),
            len(report.c3_violations),
        )
        super().__init__(
            "score model fails regularity checks (C1/C2/C3 violations: %d/%d/%d)" % counts
        )


@dataclass(frozen=True)
class OvertakeRecord:
    rank: int
    effort_required: Effort
    cost_required: Effort
    reward_gap: float
    profitable: bool
    marginal: bool = False


@dataclass(frozen=True)
class EquilibriumVerdict:
    status: Status
    records: tuple

    @property
    def witnesses(self):
        return [r for r in self.records if r.profitable]

    @property
    def marginal(self) -> bool:
        return any(r.marginal for r in self.records)


def overtake_effort(scores: ScoreModel, r: int, tbt: float) -> Effort:
    """Additional effort for the rank-``r`` model to match the baseline score
    of the rank-``r-1`` model at tune-before-test level ``tbt``."""
    target = scores.score(r - 2, tbt)
    total = scores.required(r - 1, target)
    if total is UNREACHABLE or math.isinf(total):
        return total
    return max(0.0, total - tbt)


def just_overtake_effort(game: GameInstance, r: int) -> Effort:
    """Infimum of efforts that lift model ``r`` strictly above model ``r-1``.

    The value returned solves the weak equality; the infimum itself only ties,
    and ties go to the more capable model, so an executed deviation needs a
    little more.  Its cost is still the right quantity to compare against the
    reward gap.
    """
    if not 2 <= r <= game.n:
        raise ValueError(f"rank must lie in 2..{game.n}, got {r}")
    return overtake_effort(game.scores, r, game.tbt)


def _record(game: GameInstance, r: int) -> OvertakeRecord:
    effort = just_overtake_effort(game, r)
    gap = game.rewards.gap(r)
    if effort is UNREACHABLE:
        return OvertakeRecord(r, UNREACHABLE, UNREACHABLE, gap, False)
    cost = game.cost(effort)
    profitable = math.isfinite(cost) and cost < gap
    marginal = math.isfinite(cost) and abs(cost - gap) < MARGINAL_TOL
    return OvertakeRecord(r, effort, cost, gap, profitable, marginal)


def zero_effort_pne_check(game: GameInstance) -> EquilibriumVerdict:
    records = tuple(_record(game, r) for r in range(2, game.n + 1))
    status = Status.NO_PNE if any(rec.profitable for rec in records) else Status.ALL_ZERO_PNE
    return EquilibriumVerdict(status, records)


def pne_verdict(
    game: GameInstance,
    *,
    assume_regular: bool = False,
    effort_grid=None,
    score_grid=None,
) -> EquilibriumVerdict:
    """Equilibrium verdict for the whole game, not only the all-zero profile.

    Requires the regularity conditions; they are checked by sampling unless
    ``assume_regular`` is set.  Raises :class:`RegularityError` otherwise.
    """
    if not assume_regular:
        efforts, targets = default_regularity_grids(game.scores, game.tbt)
        if effort_grid is not None:
            efforts = effort_grid
        if score_grid is not None:
            targets = score_grid
        report = check_regularity(game.scores, efforts, targets)
        if not report.passed:
            raise RegularityError(report)
    return zero_effort_pne_check(game)


def verify_order_preservation(game: GameInstance, profile: EffortProfile):
    """Whether more capable models score at least as high; returns
    ``(ok, (i, j))`` with the first offending pair, or ``(True, None)``."""
    v = realized_scores(game, profile)
    for i in range(game.n):
        for j in range(i + 1, game.n):
            if v[i] < v[j]:
                return False, (i, j)
    return True, None


# --- discretized game -------------------------------------------------------


class _GridGame:
    """Scores and costs tabulated on the effort grid ``k * step``."""

    def __init__(self, game: GameInstance, step: float, size: int):
        self.game = game
        self.step = step
        self.size = size
        self.efforts = step * np.arange(size)
        self.values = np.vstack(
            [game.scores.score_array(i, game.tbt + self.efforts) for i in range(game.n)]
        )
        self.costs = np.array([game.cost(float(e)) for e in self.efforts])
        self.rewards = np.asarray(game.rewards.rewards)
        self.tol = 1e-12 * max(1.0, float(self.rewards.max()))

    def ranks_of(self, i, own, scores):
        """Rank of player ``i`` scoring ``own`` against the others in ``scores``
        (rows are profiles; column ``i`` is ignored)."""
        n = scores.shape[1]
        count = np.ones(own.shape, dtype=int)
        for j in range(n):
            if j == i:
                continue
            count += scores[:, j] > own
            if j < i:
                count += scores[:, j] == own
        return count

    def candidates(self, i, scores):
        """Grid indices where player ``i``'s best responses can lie: zero and
        the cheapest index beating each other player's score.  Indices equal
        to ``size`` mean the score is out of reach on the grid."""
        n = scores.shape[1]
        cols = [np.zeros(scores.shape[0], dtype=int)]
        for j in range(n):
            if j == i:
                continue
            side = "left" if i < j else "right"
            cols.append(np.searchsorted(self.values[i], scores[:, j], side=side))
        return np.column_stack(cols)

    def utilities(self, i, idx, scores):
        """Utility of player ``i`` at grid indices ``idx`` (same shape as a
        candidate matrix) against the profile ``scores``."""
        valid = idx < self.size
        safe = np.where(valid, idx, 0)
        own = self.values[i][safe]
        out = np.empty(idx.shape)
        for c in range(idx.shape[1]):
            ranks = self.ranks_of(i, own[:, c], scores)
            out[:, c] = self.rewards[ranks - 1] - self.costs[safe[:, c]]
        return np.where(valid, out, -np.inf)

    def scores_of(self, profiles):
        return np.column_stack([self.values[i][profiles[:, i]] for i in range(profiles.shape[1])])

    def is_best_response(self, i, profiles, scores):
        cand = self.candidates(i, scores)
        best = self.utilities(i, cand, scores).max(axis=1)
        current = self.utilities(i, profiles[:, [i]], scores)[:, 0]
        return current >= best - self.tol


def _grid_size(grid_max, step):
    return int(math.ceil(grid_max / step - 1e-9)) + 1


@dataclass
class GridReport:
    """Outcome of exhaustive search over efforts on ``{0, step, 2 step, ...}``."""

    equilibria: list
    grid_step: float
    grid_max: float
    profiles_examined: int
    min_margin: float
    cost_resolution: float

    @property
    def inconclusive(self) -> bool:
        return not self.min_margin > self.cost_resolution

    @property
    def status(self) -> str:
        return "PNEFound" if self.equilibria else "NoGridPNE"

    @property
    def only_all_zero(self) -> bool:
        return len(self.equilibria) == 1 and not any(self.equilibria[0])


def default_grid_max(game: GameInstance, step: float) -> float:
    """Effort beyond which a deviation costs more than any reward difference."""
    spread = game.rewards.rewards[0] - game.rewards.rewards[-1]
    return inverse_cost(game.cost, spread) + step


def brute_force_grid_verdict(
    game: GameInstance,
    grid_step: float = 0.01,
    grid_max: Optional[float] = None,
    chunk: int = 200_000,
) -> GridReport:
    """Enumerate grid effort profiles and report every pure equilibrium.

    A profile is kept when no player has a strictly better grid effort given
    the others.  Player 0's effort is restricted to its best responses for
    each profile of the others; this is exact, since a profile where player 0
    is not best responding cannot be an equilibrium.
    """
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    n = game.n
    max_gap = max(game.rewards.gap(r) for r in range(2, n + 1))
    if grid_max is None:
        grid_max = default_grid_max(game, grid_step)
    elif grid_max < inverse_cost(game.cost, max_gap):
        raise ValueError(
            f"grid_max={grid_max} is below the effort affordable with the largest reward gap"
        )
    size = _grid_size(grid_max, grid_step)
    grid = _GridGame(game, grid_step, size)

    found = set()
    examined = 0
    total = size ** (n - 1)
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        block = np.column_stack(np.unravel_index(flat, (size,) * (n - 1)))
        examined += block.shape[0]
        profiles = np.column_stack([np.zeros(len(block), dtype=int), block])
        scores = grid.scores_of(profiles)
        cand = grid.candidates(0, scores)
        util = grid.utilities(0, cand, scores)
        best = util.max(axis=1, keepdims=True)
        rows, cols = np.nonzero(util >= best - grid.tol)
        profiles = profiles[rows]
        profiles[:, 0] = cand[rows, cols]
        profiles = np.unique(profiles, axis=0)
        scores = grid.scores_of(profiles)
        keep = np.ones(len(profiles), dtype=bool)
        for i in range(n):
            keep &= grid.is_best_response(i, profiles, scores)
        for p in profiles[keep]:
            found.add(tuple(int(k) for k in p))

    equilibria = [tuple(k * grid_step for k in p) for p in sorted(found)]
    margins = [
        abs(rec.cost_required - rec.reward_gap)
        for rec in zero_effort_pne_check(game).records
        if rec.cost_required is not UNREACHABLE and math.isfinite(rec.cost_required)
    ]
    return GridReport(
        equilibria=equilibria,
        grid_step=grid_step,
        grid_max=grid_max,
        profiles_examined=examined,
        min_margin=min(margins) if margins else math.inf,
        cost_resolution=float(np.max(np.diff(grid.costs))) if size > 1 else 0.0,
    )


# --- best-response dynamics -------------------------------------------------


@dataclass(frozen=True)
class Move:
    step: int
    mover: int
    old_effort: float
    new_effort: float
    gain: float


@dataclass(frozen=True)
class FixedPoint:
    profile: tuple


@dataclass(frozen=True)
class CycleDetected:
    period: int
    first_return: int


@dataclass(frozen=True)
class Exhausted:
    max_steps: int


@dataclass
class DynamicsTrace:
    moves: list = field(default_factory=list)
    terminal: object = None


MOVER_RULES = ("round-robin", "best-gain-first")


def best_response_dynamics(
    game: GameInstance,
    start: EffortProfile | None = None,
    mover_rule: str = "round-robin",
    grid_step: float = 0.01,
    max_steps: int = 10_000,
) -> DynamicsTrace:
    """Let players take turns moving to a strictly better grid best response.

    Efforts live on multiples of ``grid_step``; a start profile is snapped to
    the nearest grid points.  The run stops at a fixed point, when a state
    recurs (cycle), or after ``max_steps`` improving moves.
    """
    if mover_rule not in MOVER_RULES:
        raise ValueError(f"mover_rule must be one of {MOVER_RULES}")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    n = game.n
    if start is None:
        start = EffortProfile.zeros(n)
    if len(start) != n:
        raise ValueError("start profile has the wrong length")
    idx = [int(round(e / grid_step)) for e in start.efforts]
    grid_max = max(default_grid_max(game, grid_step), max(idx) * grid_step)
    grid = _GridGame(game, grid_step, _grid_size(grid_max, grid_step))

    def best_move(i):
        prof = np.array([idx])
        scores = grid.scores_of(prof)
        cand = grid.candidates(i, scores)
        util = grid.utilities(i, cand, scores)[0]
        current = grid.utilities(i, prof[:, [i]], scores)[0, 0]
        order = np.lexsort((cand[0], -util))
        k = int(cand[0][order[0]])
        gain = float(util[order[0]] - current)
        return k, gain

    trace = DynamicsTrace()
    visited = {}
    pointer = 0

    def state():
        return (tuple(idx), pointer) if mover_rule == "round-robin" else tuple(idx)

    visited[state()] = 0
    idle = 0
    while True:
        if mover_rule == "round-robin":
            i = pointer
            k, gain = best_move(i)
            pointer = (pointer + 1) % n
            if gain <= grid.tol:
                idle += 1
                if idle >= n:
                    trace.terminal = FixedPoint(tuple(e * grid_step for e in idx))
                    return trace
                continue
            idle = 0
        else:
            moves = [best_move(j) for j in range(n)]
            i = max(range(n), key=lambda j: (moves[j][1], -j))
            k, gain = moves[i]
            if gain <= grid.tol:
                trace.terminal = FixedPoint(tuple(e * grid_step for e in idx))
                return trace
        step = len(trace.moves) + 1
        trace.moves.append(Move(step, i, idx[i] * grid_step, k * grid_step, gain))
        idx[i] = k
        key = state()
        if key in visited:
            trace.terminal = CycleDetected(step - visited[key], step)
            return trace
        visited[key] = step
        if step >= max_steps:
            trace.terminal = Exhausted(max_steps)
            return trace
