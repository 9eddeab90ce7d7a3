"""Post-effort score curves.

A score curve maps total benchmark-specific effort ``e >= 0`` to a benchmark
score in ``[0, 1]``.  The default family is the generalized power law

    v(e) = L + (U - L) * sigmoid(alpha + beta * log(1 + e)),

i.e. the normalized score is linear in ``log(1 + e)`` on the logit scale.
Any other nondecreasing curve can be plugged in through :class:`CustomScore`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from ._numeric import bisect_increasing, logit, sigmoid

LOGIT_EPS = 1e-12
DEFAULT_EFFORT_MAX = 1e9


class Unreachable(enum.Enum):
    """Marker for a target score that no finite effort attains."""

    UNREACHABLE = "unreachable"

    def __repr__(self):
        return "UNREACHABLE"


UNREACHABLE = Unreachable.UNREACHABLE

Effort = Union[float, Unreachable]


def is_reachable(value) -> bool:
    return value is not UNREACHABLE


@dataclass(frozen=True)
class ScoreParams:
    """Power-law parameters for a single model."""

    alpha: float
    beta: float
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "lower", "upper"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0.0 <= self.lower < self.upper <= 1.0:
            raise ValueError(
                f"need 0 <= lower < upper <= 1, got lower={self.lower}, upper={self.upper}"
            )

    def __call__(self, effort: float) -> float:
        return eval_score(self, effort)


@dataclass(frozen=True)
class CustomScore:
    """A user-supplied nondecreasing score curve.

    ``effort_max`` bounds the numeric inversion; a target not met at
    ``effort_max`` is treated as unreachable.
    """

    fn: Callable[[float], float]
    effort_max: float = DEFAULT_EFFORT_MAX

    def __call__(self, effort: float) -> float:
        return float(self.fn(effort))


ScoreCurve = Union[ScoreParams, CustomScore]


def _expit(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def eval_score(params: ScoreParams, effort: float) -> float:
    if effort < 0:
        raise ValueError(f"effort must be nonnegative, got {effort}")
    z = params.alpha + params.beta * math.log1p(effort)
    return params.lower + (params.upper - params.lower) * sigmoid(z)


def saturated_score(curve: ScoreCurve) -> float:
    """Limit of the score as effort grows without bound.

    Exact (``upper``) for the power law; for a custom curve this is the
    score at its ``effort_max`` horizon.
    """
    if isinstance(curve, ScoreParams):
        return curve.upper
    return curve(curve.effort_max)


def required_effort(curve: ScoreCurve, target: float) -> Effort:
    """Minimal total effort for ``curve`` to reach ``target``.

    Returns ``0.0`` when the zero-effort score already meets the target and
    :data:`UNREACHABLE` when the target is at or above saturation.  May
    return ``inf`` if the exact answer overflows a float.
    """
    if not 0.0 <= target <= 1.0:
        raise ValueError(f"target must lie in [0, 1], got {target}")
    if isinstance(curve, CustomScore):
        return _required_effort_numeric(curve, target)
    if target >= curve.upper:
        return UNREACHABLE
    if eval_score(curve, 0.0) >= target:
        return 0.0
    normalized = (target - curve.lower) / (curve.upper - curve.lower)
    exponent = (logit(normalized, LOGIT_EPS) - curve.alpha) / curve.beta
    if exponent > 709.0:
        return math.inf
    return max(0.0, math.expm1(exponent))


def _required_effort_numeric(curve: CustomScore, target: float) -> Effort:
    if curve(0.0) >= target:
        return 0.0
    if curve(curve.effort_max) < target:
        return UNREACHABLE
    return bisect_increasing(curve, target, 0.0, curve.effort_max)


@dataclass(frozen=True)
class ScoreModel:
    """Score curves for players ``0 .. n-1`` in decreasing capability order."""

    curves: tuple

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        if not self.curves:
            raise ValueError("score model needs at least one player")
        for i, c in enumerate(self.curves):
            if not isinstance(c, (ScoreParams, CustomScore)):
                raise TypeError(f"player {i}: unsupported score curve {type(c).__name__}")
            s0 = c(0.0)
            if not 0.0 <= s0 <= 1.0:
                raise ValueError(f"player {i}: score at zero effort {s0} outside [0, 1]")

    @classmethod
    def power_law(cls, params: Sequence[ScoreParams]) -> "ScoreModel":
        return cls(tuple(params))

    def __len__(self):
        return len(self.curves)

    def score(self, player: int, effort: float) -> float:
        return self.curves[player](effort)

    def score_array(self, player: int, efforts) -> np.ndarray:
        """Vectorized :meth:`score` over an array of efforts."""
        efforts = np.asarray(efforts, dtype=float)
        c = self.curves[player]
        if isinstance(c, ScoreParams):
            z = c.alpha + c.beta * np.log1p(efforts)
            return c.lower + (c.upper - c.lower) * _expit(z)
        return np.array([c(float(e)) for e in efforts.ravel()]).reshape(efforts.shape)

    def required(self, player: int, target: float) -> Effort:
        return required_effort(self.curves[player], target)

    def saturated(self, player: int) -> float:
        return saturated_score(self.curves[player])


@dataclass
class RegularityReport:
    """Sampled violations of capability monotonicity (C1), diminishing
    returns in effort (C2) and nondecreasing effort gaps (C3).

    C1 entries are ``(hi, lo, effort)``; C2 entries ``(player, effort, kind)``
    with kind ``"decreasing"`` or ``"convex"``; C3 entries
    ``(hi, lo, target_score)``.
    """

    c1_violations: list = field(default_factory=list)
    c2_violations: list = field(default_factory=list)
    c3_violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.c1_violations or self.c2_violations or self.c3_violations)


def check_regularity(
    model: ScoreModel,
    effort_grid: Sequence[float],
    score_grid: Sequence[float],
    c2_tol: float = 1e-8,
) -> RegularityReport:
    """Check the score regularity conditions on sample grids.

    Players are compared in index order (index 0 is the most capable).
    C1 is checked strictly between every ordered pair; C2 through first and
    second divided differences of each curve; C3 through the required-effort
    gap of each ordered pair over ``score_grid``.
    """
    efforts = np.asarray(effort_grid, dtype=float)
    targets = np.asarray(score_grid, dtype=float)
    if efforts.size == 0 or targets.size == 0:
        raise ValueError("grids must be nonempty")
    if np.any(np.diff(efforts) < 0) or np.any(np.diff(targets) < 0):
        raise ValueError("grids must be sorted ascending")
    if np.any(efforts < 0):
        raise ValueError("effort grid must be nonnegative")

    report = RegularityReport()
    n = len(model)
    values = np.array([[model.score(i, e) for e in efforts] for i in range(n)])

    for hi in range(n):
        for lo in range(hi + 1, n):
            bad = np.nonzero(values[hi] <= values[lo])[0]
            report.c1_violations.extend((hi, lo, float(efforts[k])) for k in bad)

    if efforts.size >= 2:
        h = np.diff(efforts)
        keep = h > 0
        for i in range(n):
            dv = np.diff(values[i])
            for k in np.nonzero(dv < -c2_tol)[0]:
                report.c2_violations.append((i, float(efforts[k + 1]), "decreasing"))
            slopes = dv[keep] / h[keep]
            mids = efforts[1:][keep]
            # slope increase beyond tolerance means local convexity
            rise = np.diff(slopes) * h[keep][1:]
            for k in np.nonzero(rise > c2_tol)[0]:
                report.c2_violations.append((i, float(mids[k]), "convex"))

    for hi in range(n):
        for lo in range(hi + 1, n):
            prev = None
            for s in targets:
                gap = _effort_gap(model, hi, lo, float(s))
                if gap is _BOTH_SATURATED:
                    continue
                if gap is None:
                    report.c3_violations.append((hi, lo, float(s)))
                    continue
                if prev is not None and gap < prev - 1e-9 * max(1.0, abs(prev)):
                    report.c3_violations.append((hi, lo, float(s)))
                prev = gap if prev is None else max(prev, gap)
    return report


_BOTH_SATURATED = object()


def _effort_gap(model, hi, lo, target):
    """Required effort of ``lo`` minus that of ``hi``; None if ``hi`` cannot
    reach a target that ``lo`` can (itself a capability-order violation)."""
    e_hi = model.required(hi, target)
    e_lo = model.required(lo, target)
    if e_hi is UNREACHABLE and e_lo is UNREACHABLE:
        return _BOTH_SATURATED
    if e_hi is UNREACHABLE:
        return None
    if e_lo is UNREACHABLE:
        return math.inf
    if math.isinf(e_lo):
        return math.inf
    return e_lo - e_hi


def default_regularity_grids(model: ScoreModel, tbt: float = 0.0):
    """Effort and score grids used when the caller does not supply any."""
    top = max(1e5, 10.0 * (tbt + 1.0))
    efforts = np.unique(np.concatenate([[0.0, tbt], np.geomspace(1e-3, top, 200)]))
    lo = min(model.score(i, 0.0) for i in range(len(model)))
    hi = max(model.saturated(i) for i in range(len(model)))
    scores = np.linspace(lo, hi, 202)[1:-1]
    return efforts, scores
