"""Tests for distribution fitting: Owen's T, family CDFs, MLE, regression."""

import numpy as np
import pytest
from scipy import special, stats

from elaasim import fitting
from elaasim.fitting import (
    DegenerateDataError,
    cdf,
    mle_fit,
    nll,
    owens_t,
    regress_linear,
    residual_theta,
)


class TestOwensT:
    def test_zero_slope(self):
        assert owens_t(1.3, 0.0) == 0.0

    def test_unit_slope_identity(self):
        # T(h, 1) = Phi(h) (1 - Phi(h)) / 2
        for h in (0.0, 0.5, 1.0, 2.5):
            phi = special.ndtr(h)
            assert owens_t(h, 1.0) == pytest.approx(phi * (1 - phi) / 2, abs=1e-10)

    def test_h_zero_arctan(self):
        # T(0, a) = arctan(a) / (2 pi)
        for a in (0.3, 1.0, 2.0, 7.5):
            assert owens_t(0.0, a) == pytest.approx(np.arctan(a) / (2 * np.pi), abs=1e-10)

    def test_infinite_slope_limit(self):
        # T(h, inf) -> (1 - Phi(|h|)) / 2; a=1e8 is close enough for 1e-10
        h = 1.7
        assert owens_t(h, 1e8) == pytest.approx((1 - special.ndtr(h)) / 2, abs=1e-10)

    def test_against_scipy(self):
        rng = np.random.default_rng(7)
        h = rng.uniform(-4, 4, 200)
        for a in (-5.0, -1.0, -0.2, 0.4, 1.0, 3.0, 12.0):
            np.testing.assert_allclose(owens_t(h, a), special.owens_t(h, a), atol=1e-12)

    def test_even_in_h(self):
        assert owens_t(2.1, 0.7) == pytest.approx(owens_t(-2.1, 0.7), abs=1e-14)

    def test_odd_in_a(self):
        assert owens_t(1.1, -0.6) == pytest.approx(-owens_t(1.1, 0.6), abs=1e-14)


class TestCdfs:
    def test_gaussian_matches_scipy(self):
        x = np.linspace(-5, 9, 50)
        np.testing.assert_allclose(
            cdf("gaussian", (2.0, 1.5), x), stats.norm.cdf(x, 2.0, 1.5), atol=1e-12
        )

    def test_weibull_matches_scipy(self):
        x = np.linspace(0.01, 10, 50)
        np.testing.assert_allclose(
            cdf("weibull", (2.0, 3.0), x), stats.weibull_min.cdf(x, 3.0, scale=2.0), atol=1e-12
        )

    def test_weibull_zero_below_origin(self):
        assert cdf("weibull", (1.0, 2.0), -1.0) == 0.0

    def test_skew_normal_matches_scipy(self):
        x = np.linspace(-4, 8, 60)
        got = cdf("skew_normal", (1.0, 2.0, 3.0), x)
        want = stats.skewnorm.cdf(x, 3.0, loc=1.0, scale=2.0)
        np.testing.assert_allclose(got, want, atol=1e-10)

    def test_skew_normal_gaussian_reduction(self):
        # shape 0 reduces the skew normal to the plain Gaussian
        x = np.linspace(-6, 6, 100)
        got = cdf("skew_normal", (0.5, 1.2, 0.0), x)
        want = cdf("gaussian", (0.5, 1.2), x)
        np.testing.assert_allclose(got, want, atol=1e-10)

    def test_monotone_and_bounded(self):
        x = np.linspace(-10, 30, 400)
        for family, theta in [
            ("gaussian", (3.0, 2.0)),
            ("weibull", (5.0, 1.7)),
            ("skew_normal", (3.0, 2.0, -4.0)),
        ]:
            y = cdf(family, theta, x)
            assert np.all(np.diff(y) >= -1e-12)
            assert y.min() >= 0.0 and y.max() <= 1.0

    def test_invalid_theta_rejected(self):
        with pytest.raises(ValueError):
            cdf("gaussian", (0.0, -1.0), 0.0)
        with pytest.raises(ValueError):
            cdf("weibull", (1.0,), 0.0)
        with pytest.raises(ValueError):
            cdf("nonsense", (1.0, 1.0), 0.0)


class TestNll:
    def test_matches_scipy_logpdf(self):
        rng = np.random.default_rng(3)
        x = rng.normal(5, 2, 500)
        assert nll("gaussian", (5.0, 2.0), x) == pytest.approx(
            -stats.norm.logpdf(x, 5.0, 2.0).sum(), rel=1e-10
        )
        xp = rng.weibull(2.0, 500) * 3.0
        assert nll("weibull", (3.0, 2.0), xp) == pytest.approx(
            -stats.weibull_min.logpdf(xp, 2.0, scale=3.0).sum(), rel=1e-10
        )
        assert nll("skew_normal", (4.0, 2.0, 1.5), x) == pytest.approx(
            -stats.skewnorm.logpdf(x, 1.5, loc=4.0, scale=2.0).sum(), rel=1e-8
        )


class TestMleFit:
    def test_gaussian_closed_form(self):
        rng = np.random.default_rng(11)
        x = rng.normal(10, 3, 20000)
        fit = mle_fit("gaussian", x)
        assert fit.theta[0] == pytest.approx(x.mean(), abs=1e-12)
        assert fit.theta[1] == pytest.approx(x.std(), abs=1e-12)
        assert fit.converged

    def test_weibull_recovery(self):
        rng = np.random.default_rng(12)
        x = stats.weibull_min.rvs(24.0, scale=190.0, size=50000, random_state=rng)
        fit = mle_fit("weibull", x)
        assert fit.theta[0] == pytest.approx(190.0, rel=0.01)
        assert fit.theta[1] == pytest.approx(24.0, rel=0.03)

    def test_weibull_matches_scipy_mle(self):
        rng = np.random.default_rng(13)
        x = stats.weibull_min.rvs(3.0, scale=2.0, size=5000, random_state=rng)
        shape, _, scale = stats.weibull_min.fit(x, floc=0)
        fit = mle_fit("weibull", x)
        assert fit.theta[0] == pytest.approx(scale, rel=1e-4)
        assert fit.theta[1] == pytest.approx(shape, rel=1e-4)

    def test_skew_normal_recovery(self):
        rng = np.random.default_rng(14)
        loc, scale, shape = 180.0, 8.0, 2.5
        x = stats.skewnorm.rvs(shape, loc=loc, scale=scale, size=100000, random_state=rng)
        fit = mle_fit("skew_normal", x)
        assert fit.converged
        assert fit.theta[0] == pytest.approx(loc, abs=0.05 * scale)
        assert fit.theta[1] == pytest.approx(scale, rel=0.05)
        assert fit.theta[2] == pytest.approx(shape, rel=0.05)

    def test_skew_normal_negative_shape(self):
        rng = np.random.default_rng(15)
        x = stats.skewnorm.rvs(-3.0, loc=1.0, scale=2.0, size=50000, random_state=rng)
        fit = mle_fit("skew_normal", x)
        assert fit.theta[2] == pytest.approx(-3.0, rel=0.1)

    def test_residual_attached(self):
        rng = np.random.default_rng(16)
        x = rng.normal(0, 1, 2000)
        fit = mle_fit("gaussian", x)
        assert np.isfinite(fit.theta_err)
        assert fit.theta_err == pytest.approx(residual_theta(fit, x))

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            mle_fit("gaussian", np.arange(5.0))

    def test_degenerate_samples(self):
        const = np.full(100, 3.0)
        for family in ("gaussian", "weibull", "skew_normal"):
            with pytest.raises(DegenerateDataError):
                mle_fit(family, const)

    def test_weibull_needs_positive(self):
        x = np.linspace(-1, 5, 100)
        with pytest.raises(ValueError):
            mle_fit("weibull", x)


class TestRegression:
    def test_exact_line(self):
        x = np.array([10.0, 15.0, 20.0, 25.0, 30.0])
        y = 6.64 * x + 120.0
        slope, intercept = regress_linear(np.column_stack([x, y]))
        assert slope == pytest.approx(6.64, abs=1e-12)
        assert intercept == pytest.approx(120.0, abs=1e-10)

    def test_matches_polyfit(self):
        rng = np.random.default_rng(17)
        x = np.linspace(10, 30, 5)
        y = 2.0 * x + 1.0 + rng.normal(0, 0.3, 5)
        slope, intercept = regress_linear(np.column_stack([x, y]))
        p = np.polyfit(x, y, 1)
        assert slope == pytest.approx(p[0], abs=1e-10)
        assert intercept == pytest.approx(p[1], abs=1e-10)

    def test_errors(self):
        with pytest.raises(ValueError):
            regress_linear([[1.0, 2.0]])
        with pytest.raises(ValueError):
            regress_linear([[1.0, 2.0], [1.0, 3.0]])


def test_fit_quality_ordering_on_skewed_data():
    # strongly skewed data should favor the skew normal over the gaussian
    rng = np.random.default_rng(18)
    x = stats.skewnorm.rvs(6.0, loc=100.0, scale=10.0, size=20000, random_state=rng)
    fits = {f: mle_fit(f, x) for f in fitting.FAMILIES}
    assert fits["skew_normal"].theta_err < fits["gaussian"].theta_err
