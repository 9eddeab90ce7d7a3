import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from rankgame.cost import (
    LinearCost,
    PiecewiseLinearCost,
    PowerCost,
    UnsupportedReparametrization,
    cost_from_spec,
    cost_to_spec,
    eval_cost,
    inverse_cost,
    reparametrize_effort,
)

COSTS = [
    LinearCost(1.0),
    LinearCost(2.5),
    PowerCost(0.5, 2.0),
    PowerCost(3.0, 1.5),
    PiecewiseLinearCost((5.0,), (1.0, 3.0)),
    PiecewiseLinearCost((1.0, 2.0, 4.0), (0.0, 0.5, 2.0, 2.0)),
]


class TestEvaluation:
    def test_examples(self):
        assert eval_cost(LinearCost(1.0), 0.0) == 0.0
        assert eval_cost(LinearCost(2.0), 6.389) == pytest.approx(12.778)
        assert eval_cost(PowerCost(0.5, 2.0), 4.0) == pytest.approx(8.0)

    def test_negative_effort_rejected(self):
        with pytest.raises(ValueError):
            eval_cost(LinearCost(1.0), -0.5)

    @pytest.mark.parametrize("cost", COSTS, ids=repr)
    @given(e1=st.floats(0, 1e3), e2=st.floats(0, 1e3))
    def test_nondecreasing_and_convex(self, cost, e1, e2):
        lo, hi = sorted((e1, e2))
        assert cost(0.0) == 0.0
        assert cost(lo) <= cost(hi) + 1e-12
        mid = cost(0.5 * (lo + hi))
        assert mid <= 0.5 * (cost(lo) + cost(hi)) + 1e-9 * max(1.0, cost(hi))


class TestValidation:
    @pytest.mark.parametrize(
        "build",
        [
            lambda: LinearCost(0.0),
            lambda: PowerCost(1.0, 0.5),
            lambda: PowerCost(0.0, 2.0),
            lambda: PiecewiseLinearCost((5.0,), (3.0, 1.0)),
            lambda: PiecewiseLinearCost((5.0,), (1.0,)),
            lambda: PiecewiseLinearCost((5.0,), (0.0, 0.0)),
        ],
    )
    def test_rejects(self, build):
        with pytest.raises(ValueError):
            build()


class TestInverse:
    def test_examples(self):
        assert inverse_cost(LinearCost(1.0), 10.0) == pytest.approx(10.0)
        assert inverse_cost(PowerCost(0.5, 2.0), 8.0) == pytest.approx(4.0)

    def test_piecewise_against_root_finding(self):
        cost = PiecewiseLinearCost((5.0,), (1.0, 3.0))
        oracle = brentq(lambda e: cost(e) - 11.0, 0.0, 100.0, xtol=1e-14)
        assert inverse_cost(cost, 11.0) == pytest.approx(7.0)
        assert inverse_cost(cost, 11.0) == pytest.approx(oracle, rel=1e-12)

    def test_flat_piece_returns_largest_effort(self):
        cost = PiecewiseLinearCost((2.0,), (0.0, 1.0))
        assert inverse_cost(cost, 0.0) == 2.0

    @pytest.mark.parametrize("cost", COSTS, ids=repr)
    @given(b=st.floats(0.0, 1e4))
    def test_round_trip(self, cost, b):
        assert cost(inverse_cost(cost, b)) == pytest.approx(b, rel=1e-9, abs=1e-9)


class TestReparametrize:
    def test_linear(self):
        assert reparametrize_effort(LinearCost(1.0), 2.0, 3.0) == pytest.approx(6.0)

    def test_power_against_root_finding(self):
        cost = PowerCost(1.0, 2.0)
        oracle = brentq(lambda z: z * z - 4.0 * 9.0, 0.0, 100.0, xtol=1e-14)
        assert reparametrize_effort(cost, 4.0, 3.0) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("cost", COSTS[:5], ids=repr)
    def test_identity_at_one(self, cost):
        assert reparametrize_effort(cost, 1.0, 3.7) == 3.7

    @pytest.mark.parametrize("cost", COSTS[:5], ids=repr)
    @given(g=st.floats(0.05, 20), e=st.floats(0, 500))
    def test_defining_equation(self, cost, g, e):
        z = reparametrize_effort(cost, g, e)
        assert cost(z) == pytest.approx(g * cost(e), rel=1e-9, abs=1e-12)

    def test_flat_start_unsupported(self):
        with pytest.raises(UnsupportedReparametrization):
            reparametrize_effort(COSTS[-1], 2.0, 1.0)

    def test_gamma_must_be_positive(self):
        with pytest.raises(ValueError):
            reparametrize_effort(LinearCost(1.0), 0.0, 1.0)


@pytest.mark.parametrize("cost", COSTS, ids=repr)
def test_dict_round_trip(cost):
    spec = cost_to_spec(cost)
    assert cost_from_spec(spec["family"], **spec["params"]) == cost


def test_unknown_family():
    with pytest.raises(ValueError):
        cost_from_spec("exponential", rate=1.0)


def test_infinite_effort():
    assert math.isinf(LinearCost(1.0)(math.inf))
