"""Fit power-law score curves to post-training trajectories.

Each model's trajectory is regressed as ``logit((v - L)/(U - L))`` against
``log(1 + e)``; the intercept and slope are the baseline logit ``alpha`` and
the scaling coefficient ``beta``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .score import UNREACHABLE, ScoreParams, eval_score, required_effort

CLAMP_EPS = 1e-6
LOW_CONFIDENCE_R2 = 0.5


class DataError(ValueError):
    """Observations that cannot be used (out of range, degenerate design)."""

    def __init__(self, message, rows=()):
        self.rows = list(rows)
        super().__init__(message)


class FitError(ValueError):
    pass


@dataclass
class TrajectoryFit:
    alpha: float
    beta: float
    lower: float
    upper: float
    r2: float
    residuals: np.ndarray
    clamped_rows: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.beta > 0

    @property
    def diagnostic(self) -> Optional[str]:
        if self.accepted:
            return None
        return f"nonpositive slope beta={self.beta:.6g}; scores do not improve with effort"

    @property
    def params(self) -> ScoreParams:
        if not self.accepted:
            raise FitError(self.diagnostic)
        return ScoreParams(self.alpha, self.beta, self.lower, self.upper)


def fit_trajectory(efforts, scores, lower: float = 0.0, upper: float = 1.0) -> TrajectoryFit:
    """Ordinary least squares of the score logit on ``log(1 + effort)``.

    Scores outside ``[lower, upper]`` raise :class:`DataError`; scores within
    ``CLAMP_EPS`` of either bound are pulled inside with a warning.
    """
    e = np.asarray(efforts, dtype=float)
    v = np.asarray(scores, dtype=float)
    if e.shape != v.shape or e.ndim != 1:
        raise DataError("efforts and scores must be 1-d arrays of equal length")
    if e.size < 2:
        raise DataError("need at least two observations")
    if not 0.0 <= lower < upper <= 1.0:
        raise DataError(f"need 0 <= lower < upper <= 1, got {lower}, {upper}")
    bad = np.nonzero(~np.isfinite(e) | (e < 0))[0]
    if bad.size:
        raise DataError(f"negative or non-finite efforts in rows {bad.tolist()}", bad)
    bad = np.nonzero(~np.isfinite(v) | (v < lower) | (v > upper))[0]
    if bad.size:
        raise DataError(
            f"scores outside [{lower}, {upper}] in rows {bad.tolist()}", bad.tolist()
        )
    if np.ptp(e) == 0:
        raise FitError("all efforts are equal; slope is not identifiable")

    lo, hi = lower + CLAMP_EPS, upper - CLAMP_EPS
    clamped = np.nonzero((v < lo) | (v > hi))[0].tolist()
    for row in clamped:
        warnings.warn(f"row {row}: score {v[row]} clamped into ({lower}, {upper})", stacklevel=2)
    v = np.clip(v, lo, hi)

    x = np.log1p(e)
    p = (v - lower) / (upper - lower)
    y = np.log(p) - np.log1p(-p)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    beta = float(np.sum((x - xm) * (y - ym)) / sxx)
    alpha = float(ym - beta * xm)
    resid = y - (alpha + beta * x)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - ym) ** 2))
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res == 0 else 0.0
    return TrajectoryFit(alpha, beta, lower, upper, r2, resid, clamped)


@dataclass(frozen=True)
class UpperAsymptoteSearch:
    upper: float
    profile: tuple  # (candidate, r2) pairs
    low_confidence: bool


def estimate_upper_asymptote(efforts, scores, lower: float, candidates) -> UpperAsymptoteSearch:
    """Pick the upper asymptote from ``candidates`` that maximizes R^2.

    Candidates at or below the largest observed score cannot bound the data;
    they stay in the profile with ``r2=None``.
    """
    cands = sorted(float(c) for c in candidates)
    if not cands:
        raise ValueError("candidate grid is empty")
    if cands[-1] > 1.0 or cands[0] <= lower:
        raise ValueError(f"candidates must lie in ({lower}, 1]")
    top = float(np.max(scores))
    profile = []
    for u in cands:
        if u <= top:
            profile.append((u, None))
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fit = fit_trajectory(efforts, scores, lower, u)
        profile.append((u, fit.r2))
    feasible = [t for t in profile if t[1] is not None]
    if not feasible:
        raise DataError(f"every candidate is at or below the largest score {top}")
    best_u, best_r2 = max(feasible, key=lambda t: (t[1], -t[0]))
    return UpperAsymptoteSearch(best_u, tuple(profile), best_r2 < LOW_CONFIDENCE_R2)


@dataclass(frozen=True)
class PairStatistics:
    e_req_zero: object  # float or UNREACHABLE
    gamma: float
    lam: Optional[float] = None
    inverted: bool = False


def pair_statistics(
    fit_hi: TrajectoryFit, fit_lo: TrajectoryFit, rho: Optional[float] = None
) -> PairStatistics:
    """Catch-up effort at zero baseline, learning-rate ratio and (given the
    reward gap in effort units ``rho``) the effective incentive."""
    hi, lo = fit_hi.params, fit_lo.params
    gamma = lo.beta / hi.beta
    if (hi.lower, hi.upper) == (lo.lower, lo.upper):
        e0 = math.expm1((hi.alpha - lo.alpha) / lo.beta)
    else:
        e0 = required_effort(lo, eval_score(hi, 0.0))
    inverted = False
    if e0 is not UNREACHABLE and e0 <= 0:
        if e0 < 0:
            warnings.warn("lower-capability model already scores higher at zero effort", stacklevel=2)
            inverted = True
        e0 = 0.0
    lam = None
    if rho is not None:
        if not rho > 0:
            raise ValueError("rho must be positive")
        if e0 is UNREACHABLE:
            lam = 0.0
        else:
            lam = rho / e0 if e0 > 0 else math.inf
    return PairStatistics(e0, gamma, lam, inverted)


def slope_ratio(fit_hi: TrajectoryFit, fit_lo: TrajectoryFit, delta: float, h: float) -> float:
    """Forward-difference slope of the weaker model's fitted curve over the
    stronger one's, at effort ``delta``."""
    if not h > 0:
        raise ValueError("h must be positive")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    hi, lo = fit_hi.params, fit_lo.params
    s_hi = (eval_score(hi, delta + h) - eval_score(hi, delta)) / h
    s_lo = (eval_score(lo, delta + h) - eval_score(lo, delta)) / h
    if abs(s_hi) < 1e-12:
        raise FitError("stronger model's slope vanishes (saturated); ratio undefined")
    return s_lo / s_hi


def fit_models(samples: dict, lower: float = 0.0, upper: float = 1.0) -> dict:
    """Fit every model in ``{model_id: (efforts, scores)}``."""
    return {mid: fit_trajectory(e, v, lower, upper) for mid, (e, v) in samples.items()}


def validate_dataset(samples: dict):
    for mid, (e, v) in samples.items():
        if len(e) < 3:
            raise DataError(f"model {mid!r}: need at least 3 samples, got {len(e)}")
        if len(set(float(x) for x in e)) < 2:
            raise DataError(f"model {mid!r}: need at least 2 distinct effort values")
