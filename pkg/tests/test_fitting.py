import math

import numpy as np
import pytest

from rankgame.fitting import (
    DataError,
    FitError,
    estimate_upper_asymptote,
    fit_models,
    fit_trajectory,
    pair_statistics,
    slope_ratio,
    validate_dataset,
)
from rankgame.score import ScoreParams, eval_score


def curve(a, b, efforts, lower=0.0, upper=1.0):
    p = ScoreParams(a, b, lower, upper)
    return np.array([eval_score(p, e) for e in efforts])


class TestFitTrajectory:
    def test_noiseless_round_trip(self):
        e = np.linspace(0, 500, 20)
        fit = fit_trajectory(e, curve(-1.0, 0.5, e))
        assert fit.alpha == pytest.approx(-1.0, rel=1e-6)
        assert fit.beta == pytest.approx(0.5, rel=1e-6)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)
        assert fit.accepted

    def test_two_points(self):
        fit = fit_trajectory([1.0, 9.0], [0.3, 0.6])
        assert fit.r2 == 1.0
        np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-12)

    def test_flat_rejected(self):
        fit = fit_trajectory([0, 10, 100], [0.5, 0.5, 0.5])
        assert fit.beta == 0.0
        assert not fit.accepted
        assert "nonpositive" in fit.diagnostic
        with pytest.raises(FitError):
            fit.params

    def test_custom_bounds(self):
        e = np.geomspace(1, 1000, 15)
        fit = fit_trajectory(e, curve(0.3, 0.7, e, 0.25, 0.9), 0.25, 0.9)
        assert (fit.alpha, fit.beta) == pytest.approx((0.3, 0.7), rel=1e-9)

    def test_out_of_range(self):
        with pytest.raises(DataError) as err:
            fit_trajectory([0, 1, 2], [0.2, 0.95, 0.3], 0.0, 0.9)
        assert err.value.rows == [1]

    def test_boundary_clamped(self):
        with pytest.warns(UserWarning, match="clamped"):
            fit = fit_trajectory([0, 1, 2, 3], [0.0, 0.2, 0.3, 0.35])
        assert fit.clamped_rows == [0]

    def test_equal_efforts(self):
        with pytest.raises(FitError):
            fit_trajectory([3, 3, 3], [0.2, 0.3, 0.4])


class TestUpperAsymptote:
    def test_recovers_truth(self):
        e = np.linspace(0, 500, 20)
        res = estimate_upper_asymptote(e, curve(-1.0, 0.5, e, 0.0, 0.9), 0.0, [0.85, 0.9, 0.95, 1.0])
        assert res.upper == 0.9
        assert not res.low_confidence

    def test_single_candidate(self):
        e = np.linspace(0, 500, 20)
        res = estimate_upper_asymptote(e, curve(-1.0, 0.5, e), 0.0, [1.0])
        assert res.upper == 1.0

    def test_noise_is_low_confidence(self):
        rng = np.random.default_rng(42)
        e = np.linspace(0, 500, 30)
        scores = rng.permutation(curve(-1.0, 0.5, e))
        res = estimate_upper_asymptote(e, scores, 0.0, [0.9, 0.95, 1.0])
        best = dict(res.profile)[res.upper]
        assert best < 0.5
        assert res.low_confidence

    def test_all_candidates_below_data(self):
        with pytest.raises(DataError):
            estimate_upper_asymptote([0, 1, 2], [0.5, 0.8, 0.9], 0.0, [0.6, 0.7])


class TestPairStatistics:
    def fits(self, a1, b1, a2, b2):
        e = np.geomspace(1, 1000, 12)
        return fit_trajectory(e, curve(a1, b1, e)), fit_trajectory(e, curve(a2, b2, e))

    def test_closed_form(self):
        hi, lo = self.fits(1.0, 1.0, 0.0, 0.5)
        st = pair_statistics(hi, lo)
        assert st.e_req_zero == pytest.approx(math.e**2 - 1, rel=1e-8)
        assert st.gamma == lo.beta / hi.beta
        assert st.gamma == pytest.approx(0.5, rel=1e-9)

    def test_identical(self):
        hi, lo = self.fits(0.0, 0.5, 0.0, 0.5)
        st = pair_statistics(hi, lo)
        assert st.e_req_zero == pytest.approx(0.0, abs=1e-9)
        assert st.gamma == pytest.approx(1.0)

    def test_incentive(self):
        hi, lo = self.fits(1.0, 1.0, 0.0, 0.5)
        st = pair_statistics(hi, lo, rho=1000.0)
        assert st.lam == pytest.approx(1000.0 / (math.e**2 - 1), rel=1e-8)
        assert 1000 / 13.7 == pytest.approx(73, abs=0.5)

    def test_inverted_pair_warns(self):
        hi, lo = self.fits(0.0, 0.5, 1.0, 0.5)
        with pytest.warns(UserWarning):
            st = pair_statistics(hi, lo)
        assert st.inverted and st.e_req_zero == 0.0

    def test_different_bounds_use_raw_scores(self):
        e = np.geomspace(1, 1000, 12)
        hi = fit_trajectory(e, curve(0.5, 0.8, e, 0.1, 0.95), 0.1, 0.95)
        lo = fit_trajectory(e, curve(-0.5, 0.6, e, 0.0, 0.9), 0.0, 0.9)
        st = pair_statistics(hi, lo)
        target = eval_score(ScoreParams(0.5, 0.8, 0.1, 0.95), 0.0)
        assert eval_score(ScoreParams(-0.5, 0.6, 0.0, 0.9), st.e_req_zero) == pytest.approx(target, abs=1e-8)


class TestSlopeRatio:
    def fit(self, a, b):
        e = np.geomspace(1, 1000, 12)
        return fit_trajectory(e, curve(a, b, e))

    def test_identical(self):
        f = self.fit(0.0, 0.5)
        assert slope_ratio(f, f, 3.0, 1.0) == pytest.approx(1.0)

    def test_slower_learner(self):
        hi, lo = self.fit(1.0, 1.0), self.fit(0.0, 0.5)
        delta = 0.0
        r = slope_ratio(hi, lo, delta, 1e-4)
        s_hi = (eval_score(ScoreParams(1, 1), 1e-4) - eval_score(ScoreParams(1, 1), 0)) / 1e-4
        s_lo = (eval_score(ScoreParams(0, 0.5), 1e-4) - eval_score(ScoreParams(0, 0.5), 0)) / 1e-4
        assert r == pytest.approx(s_lo / s_hi, rel=1e-6)
        assert r < 1

    def test_converges_in_h(self):
        hi, lo = self.fit(1.0, 1.0), self.fit(0.0, 0.5)
        vals = [slope_ratio(hi, lo, 2.0, h) for h in (1.0, 0.1, 0.01, 0.001)]
        assert abs(vals[-1] - vals[-2]) / abs(vals[-1]) < 0.01

    def test_bad_step(self):
        f = self.fit(0.0, 0.5)
        with pytest.raises(ValueError):
            slope_ratio(f, f, 0.0, 0.0)


class TestDataset:
    def test_too_few(self):
        with pytest.raises(DataError):
            validate_dataset({"m": ([0, 1], [0.1, 0.2])})

    def test_one_effort(self):
        with pytest.raises(DataError):
            validate_dataset({"m": ([2, 2, 2], [0.1, 0.2, 0.3])})

    def test_fit_models(self):
        e = [0, 10, 100]
        fits = fit_models({"a": (e, curve(0, 1, e)), "b": (e, curve(-1, 1, e))})
        assert list(fits) == ["a", "b"]
        assert fits["b"].alpha == pytest.approx(-1.0)
