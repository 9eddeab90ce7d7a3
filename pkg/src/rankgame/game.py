"""Capabilities, rank rewards, the follower game and both sides' utilities.

Players are indexed ``0 .. n-1`` in strictly decreasing capability order;
ranks are 1-based (rank 1 is the top of the leaderboard).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .cost import CostModel, reparametrize_effort
from .score import CustomScore, ScoreModel


@dataclass(frozen=True)
class CapabilityProfile:
    thetas: tuple
    weights: tuple | None = None
    vectors: tuple | None = None

    def __post_init__(self):
        thetas = tuple(float(t) for t in self.thetas)
        object.__setattr__(self, "thetas", thetas)
        if len(thetas) < 2:
            raise ValueError("need at least two players")
        if any(not (math.isfinite(t) and t > 0) for t in thetas):
            raise ValueError("capabilities must be positive and finite")
        for k, (a, b) in enumerate(zip(thetas, thetas[1:])):
            if not a > b:
                raise ValueError(
                    f"capabilities must be strictly decreasing; players {k} and {k + 1} "
                    f"have {a} and {b}"
                )

    @classmethod
    def from_vectors(cls, weights, vectors) -> "CapabilityProfile":
        thetas = [project_capability(weights, v) for v in vectors]
        return cls(
            tuple(thetas),
            weights=tuple(float(w) for w in weights),
            vectors=tuple(tuple(float(x) for x in v) for v in vectors),
        )

    def __len__(self):
        return len(self.thetas)


def project_capability(weights, theta_vec) -> float:
    """Scalar capability as the inner product of benchmark weights and a
    multi-dimensional capability vector."""
    w = np.asarray(weights, dtype=float)
    v = np.asarray(theta_vec, dtype=float)
    if w.shape != v.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {v.shape}")
    theta = float(w @ v)
    if not theta > 0:
        raise ValueError(f"projected capability must be positive, got {theta}")
    return theta


@dataclass(frozen=True)
class RewardScheme:
    rewards: tuple

    def __post_init__(self):
        rewards = tuple(float(r) for r in self.rewards)
        object.__setattr__(self, "rewards", rewards)
        if not rewards:
            raise ValueError("reward scheme is empty")
        if any(not math.isfinite(r) or r < 0 for r in rewards):
            raise ValueError("rewards must be finite and nonnegative")
        if any(b > a for a, b in zip(rewards, rewards[1:])):
            raise ValueError("rewards must be non-increasing in rank")

    @classmethod
    def winner_take_all(cls, n: int, reward: float) -> "RewardScheme":
        return cls((reward,) + (0.0,) * (n - 1))

    @classmethod
    def top_k(cls, n: int, k: int, reward: float) -> "RewardScheme":
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in 1..{n}, got {k}")
        return cls((reward,) * k + (0.0,) * (n - k))

    @classmethod
    def decay(cls, n: int, reward: float, ratio: float) -> "RewardScheme":
        """Geometric decay ``reward * ratio**(j-1)`` for rank ``j``."""
        if not 0 <= ratio <= 1:
            raise ValueError(f"decay ratio must lie in [0, 1], got {ratio}")
        return cls(tuple(reward * ratio**j for j in range(n)))

    def __len__(self):
        return len(self.rewards)

    def reward(self, rank: int) -> float:
        return self.rewards[rank - 1]

    def gap(self, rank: int) -> float:
        """Prize for climbing from ``rank`` to ``rank - 1``."""
        return self.rewards[rank - 2] - self.rewards[rank - 1]


@dataclass(frozen=True)
class GameInstance:
    """The follower game induced by a fixed tune-before-test level ``tbt``."""

    capabilities: CapabilityProfile
    scores: ScoreModel
    cost: CostModel
    rewards: RewardScheme
    tbt: float = 0.0
    tie_tol: float = 0.0

    def __post_init__(self):
        n = len(self.capabilities)
        if len(self.scores) != n:
            raise ValueError(f"score model covers {len(self.scores)} players, expected {n}")
        if len(self.rewards) != n:
            raise ValueError(f"reward scheme has {len(self.rewards)} entries, expected {n}")
        if not (math.isfinite(self.tbt) and self.tbt >= 0):
            raise ValueError(f"tbt must be finite and nonnegative, got {self.tbt}")
        if self.tie_tol < 0:
            raise ValueError("tie_tol must be nonnegative")
        base = self.baseline_scores()
        for k, (a, b) in enumerate(zip(base, base[1:])):
            if not a > b:
                raise ValueError(
                    f"baseline scores at tbt={self.tbt} are not strictly decreasing "
                    f"(player {k}: {a}, player {k + 1}: {b})"
                )

    @property
    def n(self) -> int:
        return len(self.capabilities)

    def with_tbt(self, tbt: float) -> "GameInstance":
        return replace(self, tbt=float(tbt))

    def baseline_scores(self) -> list:
        return [self.scores.score(i, self.tbt) for i in range(self.n)]


@dataclass(frozen=True)
class EffortProfile:
    """Additional efforts beyond the tune-before-test baseline."""

    efforts: tuple

    def __post_init__(self):
        efforts = tuple(float(e) for e in self.efforts)
        object.__setattr__(self, "efforts", efforts)
        if any(not e >= 0 for e in efforts):
            raise ValueError("efforts must be nonnegative")

    @classmethod
    def zeros(cls, n: int) -> "EffortProfile":
        return cls((0.0,) * n)

    def __len__(self):
        return len(self.efforts)

    def __getitem__(self, i):
        return self.efforts[i]


@dataclass(frozen=True)
class DesignerPrefs:
    ranking_reward: float
    tbt_cost: CostModel

    def __post_init__(self):
        if not self.ranking_reward > 0:
            raise ValueError("ranking_reward must be positive")


def _check_profile(game: GameInstance, profile: EffortProfile):
    if len(profile) != game.n:
        raise ValueError(f"profile has {len(profile)} efforts, game has {game.n} players")


def realized_scores(game: GameInstance, profile: EffortProfile) -> list:
    _check_profile(game, profile)
    return [game.scores.score(i, game.tbt + e) for i, e in enumerate(profile.efforts)]


def rank(scores: Sequence[float], capabilities: CapabilityProfile | Sequence[float], tie_tol=0.0):
    """Leaderboard ranks (1-based); exact ties go to the more capable model.

    With ``tie_tol > 0`` scores within the tolerance count as tied; ranks are
    then only guaranteed to be a permutation if the tie relation is
    transitive on the input.
    """
    thetas = capabilities.thetas if isinstance(capabilities, CapabilityProfile) else capabilities
    if len(scores) != len(thetas):
        raise ValueError("scores and capabilities differ in length")
    ranks = []
    for i, vi in enumerate(scores):
        r = 1
        for j, vj in enumerate(scores):
            if j == i:
                continue
            if vj > vi + tie_tol:
                r += 1
            elif abs(vj - vi) <= tie_tol and thetas[j] > thetas[i]:
                r += 1
        ranks.append(r)
    return ranks


def developer_utility(game: GameInstance, profile: EffortProfile, player: int) -> float:
    ranks = rank(realized_scores(game, profile), game.capabilities, game.tie_tol)
    return game.rewards.reward(ranks[player]) - game.cost(profile[player])


def designer_utility(game: GameInstance, profile: EffortProfile, prefs: DesignerPrefs) -> float:
    """Ranking reward if the leaderboard matches capability order, minus the
    per-model tune-before-test cost."""
    ranks = rank(realized_scores(game, profile), game.capabilities, game.tie_tol)
    consistent = ranks == list(range(1, game.n + 1))
    tbt_cost = game.n * prefs.tbt_cost(game.tbt)
    return prefs.ranking_reward * float(consistent) - tbt_cost


def heterogeneous_utility(game: GameInstance, gammas, profile: EffortProfile, player: int):
    """Utility when player ``i`` pays ``gammas[i] * c(e)`` instead of ``c(e)``."""
    ranks = rank(realized_scores(game, profile), game.capabilities, game.tie_tol)
    return game.rewards.reward(ranks[player]) - gammas[player] * game.cost(profile[player])


def homogenized_game(game: GameInstance, gammas) -> GameInstance:
    """Equivalent shared-cost game for multiplicatively separable costs.

    Player ``i`` chooses ``z = Phi_i(e)`` with ``c(z) = gammas[i] * c(e)``;
    its score curve becomes ``z -> v_i(tbt + Phi_i^{-1}(z))``.  The returned
    game has ``tbt = 0`` since the baseline is folded into the curves.
    """
    if len(gammas) != game.n:
        raise ValueError("need one gamma per player")
    curves = []
    for i, g in enumerate(gammas):
        curves.append(CustomScore(_PulledBackCurve(game, i, float(g))))
    return GameInstance(
        capabilities=game.capabilities,
        scores=ScoreModel(tuple(curves)),
        cost=game.cost,
        rewards=game.rewards,
        tbt=0.0,
        tie_tol=game.tie_tol,
    )


@dataclass(frozen=True)
class _PulledBackCurve:
    game: GameInstance
    player: int
    gamma: float

    def __call__(self, z):
        e = reparametrize_effort(self.game.cost, 1.0 / self.gamma, z)
        return self.game.scores.score(self.player, self.game.tbt + e)


def homogenize_profile(game: GameInstance, gammas, profile: EffortProfile) -> EffortProfile:
    return EffortProfile(
        tuple(reparametrize_effort(game.cost, g, e) for g, e in zip(gammas, profile.efforts))
    )
