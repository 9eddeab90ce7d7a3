"""Effort-cost functions: nondecreasing, convex, zero at zero, unbounded."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Union


class UnsupportedReparametrization(ValueError):
    pass


@dataclass(frozen=True)
class LinearCost:
    kappa: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"linear cost needs kappa > 0, got {self.kappa}")

    def __call__(self, effort):
        return self.kappa * effort

    def inverse(self, budget):
        return budget / self.kappa

    @property
    def strictly_increasing(self):
        return True


@dataclass(frozen=True)
class PowerCost:
    """``a * e**p`` with ``a > 0`` and ``p >= 1``."""

    a: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"power cost needs a > 0, got {self.a}")
        if not (math.isfinite(self.p) and self.p >= 1):
            raise ValueError(f"power cost needs p >= 1, got {self.p}")

    def __call__(self, effort):
        if math.isinf(effort):
            return math.inf
        return self.a * effort**self.p

    def inverse(self, budget):
        return (budget / self.a) ** (1.0 / self.p)

    @property
    def strictly_increasing(self):
        return True


@dataclass(frozen=True)
class PiecewiseLinearCost:
    """Convex piecewise-linear cost.

    ``slopes[k]`` applies between ``breakpoints[k-1]`` and ``breakpoints[k]``
    (with implicit breakpoints 0 and infinity), so there is one more slope
    than breakpoints.
    """

    breakpoints: tuple
    slopes: tuple

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        slopes = tuple(float(s) for s in self.slopes)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)
        if len(slopes) != len(bps) + 1:
            raise ValueError("piecewise cost needs exactly one more slope than breakpoints")
        if any(b <= 0 for b in bps) or any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be positive and strictly increasing")
        if slopes[0] < 0:
            raise ValueError("slopes must be nonnegative")
        if any(s2 < s1 for s1, s2 in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be nondecreasing (convexity)")
        if slopes[-1] <= 0:
            raise ValueError("final slope must be positive so the cost is unbounded")
        # cumulative cost at each breakpoint
        knots = [0.0]
        prev = 0.0
        for b, s in zip(bps, slopes):
            knots.append(knots[-1] + s * (b - prev))
            prev = b
        object.__setattr__(self, "_knots", tuple(knots))

    def __call__(self, effort):
        if math.isinf(effort):
            return math.inf
        k = bisect.bisect_right(self.breakpoints, effort)
        start = self.breakpoints[k - 1] if k else 0.0
        return self._knots[k] + self.slopes[k] * (effort - start)

    def inverse(self, budget):
        if math.isinf(budget):
            return math.inf
        # largest effort with cost <= budget: skip over flat leading pieces
        k = bisect.bisect_right(self._knots, budget) - 1
        while k + 1 < len(self._knots) and self._knots[k + 1] <= budget:
            k += 1
        start = self.breakpoints[k - 1] if k else 0.0
        return start + (budget - self._knots[k]) / self.slopes[k]

    @property
    def strictly_increasing(self):
        return self.slopes[0] > 0


CostModel = Union[LinearCost, PowerCost, PiecewiseLinearCost]


def eval_cost(cost: CostModel, effort: float) -> float:
    if effort < 0:
        raise ValueError(f"effort must be nonnegative, got {effort}")
    return cost(effort)


def inverse_cost(cost: CostModel, budget: float) -> float:
    """Largest effort affordable with ``budget``: ``sup{e : c(e) <= budget}``."""
    if budget < 0:
        raise ValueError(f"budget must be nonnegative, got {budget}")
    return cost.inverse(budget)


def reparametrize_effort(cost: CostModel, gamma: float, effort: float) -> float:
    """Map effort under cost ``gamma * c`` to the equivalent effort under ``c``.

    Returns ``z`` with ``c(z) = gamma * c(effort)``.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not cost.strictly_increasing:
        raise UnsupportedReparametrization("reparametrization needs a strictly increasing cost")
    if gamma == 1.0:
        return effort
    if isinstance(cost, LinearCost):
        return gamma * effort
    if isinstance(cost, PowerCost):
        return gamma ** (1.0 / cost.p) * effort
    return cost.inverse(gamma * cost(effort))


def cost_from_spec(family: str, **params) -> CostModel:
    family = family.lower().replace("-", "_")
    if family == "linear":
        return LinearCost(**params)
    if family == "power":
        return PowerCost(**params)
    if family in ("piecewise", "piecewise_linear"):
        return PiecewiseLinearCost(tuple(params["breakpoints"]), tuple(params["slopes"]))
    raise ValueError(f"unknown cost family {family!r}")


def cost_to_spec(cost: CostModel) -> dict:
    if isinstance(cost, LinearCost):
        return {"family": "linear", "params": {"kappa": cost.kappa}}
    if isinstance(cost, PowerCost):
        return {"family": "power", "params": {"a": cost.a, "p": cost.p}}
    return {
        "family": "piecewise",
        "params": {"breakpoints": list(cost.breakpoints), "slopes": list(cost.slopes)},
    }
