import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupledscale.distribution import CoupledParams, sample
from coupledscale.errors import DegenerateSampleError, DomainError
from coupledscale.estimators import (
    GENMEAN_KAPPA_MIN,
    Method,
    SampleSet,
    estimate_scale,
    estimator_metrics,
    fractional_moment,
    generalized_mean_scale,
    geometric_mean,
    geometric_mean_scale,
    geometric_prefactor,
    log_average,
    log_average_closed_form,
    scale_identity_check,
)

positive = st.floats(1e-3, 1e3)


class TestSampleSet:
    def test_rejects_value_at_location(self):
        with pytest.raises(DegenerateSampleError) as info:
            SampleSet([1.0, 2.0, 0.5], mu=2.0)
        assert info.value.index == 1
        assert "index 1" in str(info.value)

    @pytest.mark.parametrize("values", [[], [1.0, math.nan]])
    def test_rejects_bad_values(self, values):
        with pytest.raises(DomainError):
            SampleSet(values)

    def test_read_only(self):
        s = SampleSet([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 3.0

    def test_head(self):
        s = SampleSet([1.0, 2.0, 3.0], mu=0.5)
        assert list(s.head(2).values) == [1.0, 2.0]
        assert s.head(2).mu == 0.5


class TestGeometricMean:
    @pytest.mark.parametrize(
        "values, expected",
        [([2.0, 8.0], 4.0), ([math.e, 1 / math.e], 1.0), ([-3.0], 3.0)],
    )
    def test_values(self, values, expected):
        assert geometric_mean(SampleSet(values)) == pytest.approx(expected, rel=1e-15)

    def test_no_product_overflow(self):
        s = SampleSet(np.full(1000, 1e300))
        assert geometric_mean(s) == pytest.approx(1e300, rel=1e-12)

    def test_relative_to_location(self):
        assert geometric_mean(SampleSet([3.0, 9.0], mu=1.0)) == pytest.approx(4.0)


class TestPrefactor:
    def test_unity_at_cauchy(self):
        assert geometric_prefactor(1.0) == pytest.approx(1.0, abs=1e-12)

    def test_half(self):
        assert geometric_prefactor(0.5) == pytest.approx(math.sqrt(2.0), rel=1e-15)

    @pytest.mark.parametrize("kappa", [0.02, 0.1, 0.3, 2.0, 10.0, 100.0])
    def test_against_mpmath(self, kappa):
        with mpmath.workdps(30):
            k = mpmath.mpf(kappa)
            expected = 2 * mpmath.sqrt(k) * mpmath.exp(mpmath.harmonic(1 / (2 * k) - 1) / 2)
        assert geometric_prefactor(kappa) == pytest.approx(float(expected), rel=1e-13)

    @pytest.mark.parametrize("kappa", [0.0, -0.5, math.inf])
    def test_domain(self, kappa):
        with pytest.raises(DomainError):
            geometric_prefactor(kappa)


class TestGeneralizedMean:
    def test_cauchy_branch(self):
        est = generalized_mean_scale(SampleSet([2.0, 8.0]), 1.0)
        assert est.value == pytest.approx(4.0, rel=1e-15)
        assert est.method is Method.GENERALIZED_MEAN

    def test_half(self):
        s = SampleSet([math.sqrt(2), math.sqrt(2)])
        assert generalized_mean_scale(s, 0.5).value == pytest.approx(1.0, rel=1e-15)

    def test_branch_continuity(self):
        s = sample(CoupledParams(0, 1, 1, 2), 2000, 3)
        g = geometric_mean(s)
        for k in (1 - 1e-6, 1 + 1e-6):
            assert generalized_mean_scale(s, k).value == pytest.approx(g, abs=1e-4)

    def test_refuses_tiny_coupling(self):
        with pytest.raises(DomainError, match="kappa >= 0.02"):
            generalized_mean_scale(SampleSet([1.0, 2.0]), GENMEAN_KAPPA_MIN / 2)

    def test_large_power_no_overflow(self):
        # p = 49 at kappa = 0.02; 1e10**49 overflows a double
        est = generalized_mean_scale(SampleSet([1e10, 1.0]), GENMEAN_KAPPA_MIN)
        assert math.isfinite(est.value)

    def test_degenerate_names_index(self):
        with pytest.raises(DegenerateSampleError, match="index 2"):
            SampleSet([1.0, -1.0, 0.0, 2.0])

    def test_cauchy_million(self):
        s = sample(CoupledParams(0, 1, 1, 2), 1_000_000, 101)
        assert generalized_mean_scale(s, 1.0).value == pytest.approx(1.0, abs=0.01)


class TestGeometricMeanScale:
    def test_unit(self):
        est = geometric_mean_scale(SampleSet([1.0, 1.0, 1.0]), 1.0)
        assert est.value == pytest.approx(1.0, abs=1e-12)
        assert (est.n, est.kappa_assumed, est.method) == (3, 1.0, Method.GEOMETRIC_MEAN)
        assert float(est) == est.value

    def test_half(self):
        assert geometric_mean_scale(SampleSet([1.0, 1.0]), 0.5).value == pytest.approx(math.sqrt(2))

    def test_dispatch(self):
        s = SampleSet([1.0, 3.0])
        assert estimate_scale(s, 0.5, "geometric_mean") == geometric_mean_scale(s, 0.5)
        assert estimate_scale(s, 0.5, Method.GENERALIZED_MEAN) == generalized_mean_scale(s, 0.5)

    @pytest.mark.parametrize("kappa", [0.0, -1.0])
    def test_domain(self, kappa):
        with pytest.raises(DomainError):
            geometric_mean_scale(SampleSet([1.0]), kappa)

    @given(
        st.lists(positive, min_size=1, max_size=30),
        st.floats(1e-3, 1e3),
        st.floats(0.05, 5.0),
    )
    @settings(max_examples=150)
    def test_scale_equivariance(self, dist, c, kappa):
        s = SampleSet(dist)
        scaled = SampleSet([c * v for v in dist])
        for fn in (geometric_mean_scale, generalized_mean_scale):
            assert fn(scaled, kappa).value == pytest.approx(c * fn(s, kappa).value, rel=1e-11)

    @pytest.mark.slow
    @pytest.mark.parametrize("sigma", [1.0, 10.0])
    @pytest.mark.parametrize("kappa", [0.1, 0.5, 1.0, 2.0])
    def test_population_consistency(self, kappa, sigma):
        p = CoupledParams(0, sigma, kappa, 2)
        est = [geometric_mean_scale(sample(p, 100_000, (55, run)), kappa).value for run in range(20)]
        assert np.mean(est) == pytest.approx(sigma, rel=0.02)

    @pytest.mark.parametrize("kappa", [0.1, 0.5, 1.0, 2.0])
    def test_variance_decay(self, kappa):
        p = CoupledParams(0, 1, kappa, 2)
        stds = []
        for n in (1_000, 10_000, 100_000):
            est = [geometric_mean_scale(sample(p, n, (56, n, run)), kappa).value for run in range(20)]
            stds.append(np.std(est))
        assert stds[0] > stds[1] > stds[2]


class TestIdentities:
    @pytest.mark.parametrize("sigma", [1.0, 10.0])
    @pytest.mark.parametrize("kappa", [0.02, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0, 20.0])
    def test_log_average(self, kappa, sigma):
        p = CoupledParams(0, sigma, kappa, 2)
        assert scale_identity_check(p, "log_average") == pytest.approx(sigma, abs=1e-6 * sigma)
        assert log_average(p) == pytest.approx(log_average_closed_form(sigma, kappa), abs=1e-8)

    @pytest.mark.parametrize("sigma", [1.0, 10.0])
    @pytest.mark.parametrize("kappa", [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0, 20.0])
    def test_fractional_moment(self, kappa, sigma):
        p = CoupledParams(0, sigma, kappa, 2)
        assert scale_identity_check(p, "fractional_moment") == pytest.approx(sigma, abs=1e-6 * sigma)

    def test_examples(self):
        assert scale_identity_check(CoupledParams(0, 1, 0.25, 2), "log_average") == pytest.approx(1.0, abs=1e-6)
        assert scale_identity_check(CoupledParams(0, 1, 1.0, 2), "fractional_moment") == pytest.approx(1.0, abs=1e-6)
        assert scale_identity_check(CoupledParams(0, 10, 2.0, 2), "log_average") == pytest.approx(10.0, abs=1e-5)

    def test_location_ignored(self):
        p = CoupledParams(4.0, 2.0, 0.5, 2)
        assert scale_identity_check(p, "log_average") == pytest.approx(2.0, abs=1e-6)

    def test_fractional_moment_validity_region(self):
        p = CoupledParams(0, 1, 0.5, 2)
        # finite iff -1 < power < 1/kappa
        assert fractional_moment(p, 1.9) > 0
        for bad in (2.0, 3.0, -1.0):
            with pytest.raises(DomainError, match="diverges"):
                fractional_moment(p, bad)

    def test_fractional_moment_cauchy_absolute_mean_diverges(self):
        with pytest.raises(DomainError):
            fractional_moment(CoupledParams(0, 1, 1, 2), 1.0)

    def test_fractional_moment_student_oracle(self):
        # E|T|^p for Student's t with nu dof: nu^(p/2) Gamma((p+1)/2) Gamma((nu-p)/2) / (sqrt(pi) Gamma(nu/2))
        kappa, power = 0.25, 3.0
        nu = 1 / kappa
        expected = nu ** (power / 2) * math.gamma((power + 1) / 2) * math.gamma((nu - power) / 2) / (
            math.sqrt(math.pi) * math.gamma(nu / 2))
        # at sigma = 1 the coupled Gaussian is exactly Student's t with nu = 1/kappa
        got = fractional_moment(CoupledParams(0, 1, kappa, 2), power)
        assert got == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("params", [CoupledParams(0, 1, 0, 2), CoupledParams(0, 1, 0.5, 1.0)])
    def test_requirements(self, params):
        with pytest.raises(DomainError):
            scale_identity_check(params, "log_average")

    def test_unknown_identity(self):
        with pytest.raises(DomainError):
            scale_identity_check(CoupledParams(0, 1, 0.5, 2), "median")


class TestMetrics:
    @pytest.mark.parametrize(
        "estimates, truth, bias, variance, mse",
        [([1, 1, 1], 1, 0, 0, 0), ([0, 2], 1, 0, 1, 1), ([2, 2], 1, 1, 0, 1)],
    )
    def test_values(self, estimates, truth, bias, variance, mse):
        m = estimator_metrics(estimates, truth)
        assert (m.bias, m.variance, m.mse) == pytest.approx((bias, variance, mse))

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50), st.floats(-1e6, 1e6))
    def test_mse_identity(self, estimates, truth):
        m = estimator_metrics(estimates, truth)
        assert m.mse == m.variance + m.bias**2

    def test_accepts_scale_estimates(self):
        s = SampleSet([1.0, 2.0])
        m = estimator_metrics([geometric_mean_scale(s, 1.0), geometric_mean_scale(s, 1.0)], 1.0)
        assert m.variance == 0.0

    def test_needs_two(self):
        with pytest.raises(DomainError):
            estimator_metrics([1.0], 1.0)
