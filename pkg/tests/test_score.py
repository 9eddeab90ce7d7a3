import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from rankgame.score import (
    UNREACHABLE,
    CustomScore,
    ScoreModel,
    ScoreParams,
    check_regularity,
    default_regularity_grids,
    eval_score,
    required_effort,
    saturated_score,
)


class TestScoreParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(alpha=0, beta=0),
            dict(alpha=0, beta=-1),
            dict(alpha=0, beta=1, lower=0.5, upper=0.5),
            dict(alpha=0, beta=1, lower=-0.1),
            dict(alpha=0, beta=1, upper=1.2),
            dict(alpha=math.nan, beta=1),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ScoreParams(**kwargs)


class TestEvalScore:
    def test_zero_logit(self):
        assert eval_score(ScoreParams(0.0, 0.5), 0.0) == pytest.approx(0.5)

    def test_matches_root_found_effort(self):
        p = ScoreParams(-1.0, 0.5)
        e = brentq(lambda x: eval_score(p, x) - 0.5, 0.0, 1e3, xtol=1e-14)
        assert e == pytest.approx(math.e**2 - 1, rel=1e-10)
        assert eval_score(p, math.e**2 - 1) == pytest.approx(0.5, abs=1e-14)

    def test_affine_bounds(self):
        # logistic(2) from its defining series-free formula
        sig2 = 0.8807970779778823
        p = ScoreParams(2.0, 1.0, 0.25, 0.95)
        assert eval_score(p, 0.0) == pytest.approx(0.25 + 0.70 * sig2, rel=1e-14)

    def test_negative_effort_rejected(self):
        with pytest.raises(ValueError):
            eval_score(ScoreParams(0.0, 1.0), -1.0)

    @given(
        st.floats(-5, 5),
        st.floats(0.05, 3),
        st.floats(0, 1e6),
        st.floats(0, 1e6),
    )
    def test_monotone_and_bounded(self, a, b, e1, e2):
        p = ScoreParams(a, b, 0.1, 0.9)
        lo, hi = sorted((e1, e2))
        assert 0.1 <= eval_score(p, lo) <= eval_score(p, hi) <= 0.9


class TestSaturation:
    def test_unit_interval(self):
        assert saturated_score(ScoreParams(0.0, 0.5)) == 1.0

    def test_custom_bounds(self):
        assert saturated_score(ScoreParams(-3.0, 2.0, 0.1, 0.8)) == 0.8

    def test_ordering(self):
        a = ScoreParams(0.0, 1.0, 0.0, 0.9)
        b = ScoreParams(0.0, 1.0, 0.0, 0.7)
        assert saturated_score(a) > saturated_score(b)


class TestRequiredEffort:
    def test_closed_form(self):
        got = required_effort(ScoreParams(-1.0, 0.5), 0.5)
        assert got == pytest.approx(math.e**2 - 1, rel=1e-12)

    def test_clamped_at_zero(self):
        assert required_effort(ScoreParams(0.0, 1.0), 0.3) == 0.0

    def test_above_saturation(self):
        assert required_effort(ScoreParams(0.0, 1.0, 0.0, 0.8), 0.85) is UNREACHABLE
        assert required_effort(ScoreParams(0.0, 1.0, 0.0, 0.8), 0.8) is UNREACHABLE

    def test_custom_curve_uses_bisection(self):
        p = ScoreParams(-1.0, 0.5)
        custom = CustomScore(p)
        assert required_effort(custom, 0.5) == pytest.approx(math.e**2 - 1, rel=1e-9)
        assert required_effort(custom, 1.0) is UNREACHABLE

    @settings(max_examples=200)
    @given(st.floats(-4, 2), st.floats(0.1, 2), st.floats(0.01, 0.99))
    def test_inverse_of_eval(self, a, b, t):
        p = ScoreParams(a, b)
        e = required_effort(p, t)
        if e == 0.0:
            assert eval_score(p, 0.0) >= t - 1e-12
        elif math.isfinite(e):
            assert eval_score(p, e) == pytest.approx(t, abs=1e-9)


class TestScoreModel:
    def test_array_matches_scalar(self):
        m = ScoreModel((ScoreParams(0.3, 0.7, 0.1, 0.9), ScoreParams(-1.0, 0.5)))
        e = np.linspace(0, 100, 11)
        for i in range(2):
            np.testing.assert_allclose(m.score_array(i, e), [m.score(i, x) for x in e], rtol=1e-14)

    def test_power_law_constructor(self):
        m = ScoreModel.power_law([ScoreParams(0, 1), ScoreParams(-1, 1)])
        assert len(m) == 2


class TestRegularity:
    def test_regular_power_law_passes(self):
        m = ScoreModel(
            (
                ScoreParams(0.5, 0.9, 0.0, 0.99),
                ScoreParams(0.0, 0.7, 0.0, 0.97),
                ScoreParams(-0.5, 0.5, 0.0, 0.95),
            )
        )
        rep = check_regularity(m, *default_regularity_grids(m))
        assert rep.passed, rep

    def test_identical_players_violate_ordering(self):
        p = ScoreParams(0.0, 0.5)
        m = ScoreModel((p, p))
        rep = check_regularity(m, [0.0, 1.0, 10.0], [0.6])
        assert rep.c1_violations
        assert not rep.passed

    def test_crossing_table_reports_crossing(self):
        strong = CustomScore(lambda e: min(0.4 + 0.01 * e, 1.0))
        weak = CustomScore(lambda e: min(0.3 + 0.05 * e, 1.0))
        m = ScoreModel((strong, weak))
        rep = check_regularity(m, [0.0, 1.0, 2.0, 3.0, 4.0], [0.5])
        crossing = [e for _, _, e in rep.c1_violations]
        # the curves meet at e = 2.5
        assert crossing == [3.0, 4.0]

    def test_convexity_flagged(self):
        m = ScoreModel((CustomScore(lambda e: min(1e-4 * e * e, 1.0)),))
        rep = check_regularity(m, np.linspace(0, 50, 11), [0.1])
        assert any(kind == "convex" for _, _, kind in rep.c2_violations)

    def test_steep_slope_breaks_concavity(self):
        m = ScoreModel((ScoreParams(-3.0, 3.0),))
        rep = check_regularity(m, *default_regularity_grids(m))
        assert rep.c2_violations

    def test_shrinking_effort_gap_flagged(self):
        # weaker model learns faster, so the catch-up effort shrinks
        m = ScoreModel((ScoreParams(0.0, 0.3), ScoreParams(-0.5, 0.9)))
        rep = check_regularity(m, [0.0, 1.0], np.linspace(0.5, 0.95, 10))
        assert rep.c3_violations
