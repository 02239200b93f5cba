import math

import numpy as np
import pytest
from scipy import integrate, stats

from coupledscale.distribution import CoupledParams, pdf
from coupledscale.entropy import (
    average_density,
    average_density_closed_form,
    coupled_entropy,
    coupled_entropy_closed_form,
    power_integral,
    shannon_entropy,
    tsallis_entropies,
)
from coupledscale.errors import DomainError

CAUCHY = CoupledParams(0.0, 1.0, 1.0, 2.0)
KAPPAS = [0.1, 0.25, 0.5, 1.0, 2.0, 16.0]
SIGMAS = [0.5, 1.0, 10.0]


class TestAverageDensity:
    def test_cauchy(self):
        assert average_density(CAUCHY) == pytest.approx(1 / (2 * math.pi), abs=1e-12)

    def test_equals_density_one_scale_out(self):
        p = CoupledParams(0, 2.0, 0.5, 2.0)
        assert average_density(p) == pytest.approx(float(pdf(p, 2.0)), abs=1e-6)

    def test_location_invariant(self):
        p = CoupledParams(0, 1.5, 0.7, 2.0)
        assert average_density(p.replace(mu=5.0)) == pytest.approx(average_density(p), rel=1e-14)

    @pytest.mark.parametrize("sigma", SIGMAS)
    @pytest.mark.parametrize("kappa", KAPPAS)
    def test_closed_form_grid(self, kappa, sigma):
        p = CoupledParams(0, sigma, kappa, 2.0)
        assert average_density(p) == pytest.approx(average_density_closed_form(p), abs=1e-6, rel=1e-9)

    def test_gaussian_member_is_exp_minus_entropy(self):
        p = CoupledParams(0, 1, 0, 2)
        assert average_density(p) == pytest.approx(math.exp(-0.5 * math.log(2 * math.pi * math.e)), rel=1e-12)

    def test_closed_form_needs_alpha_two(self):
        with pytest.raises(DomainError):
            average_density_closed_form(CoupledParams(0, 1, 0.5, 1.0))


class TestPowerIntegral:
    @pytest.mark.parametrize("params", [CAUCHY, CoupledParams(0, 2, 0.3, 2), CoupledParams(0, 1, 0.8, 1.0),
                                        CoupledParams(0, 1, 2.0, 1.5)])
    def test_against_direct_quadrature(self, params):
        q = params.q
        f = lambda x: float(pdf(params, x)) ** q
        s = params.sigma
        half = integrate.quad(f, 0, s, epsabs=1e-14)[0] + integrate.quad(
            lambda u: f(s * math.exp(u)) * s * math.exp(u), 0, 700, epsabs=1e-14, limit=500)[0]
        assert power_integral(params) == pytest.approx(2 * half, rel=1e-10)

    def test_cauchy_value(self):
        assert power_integral(CAUCHY) == pytest.approx(1 / (2 * math.pi), rel=1e-12)

    def test_unity_at_zero_coupling(self):
        assert power_integral(CoupledParams(0, 3, 0, 2)) == 1.0


class TestCoupledEntropy:
    def test_cauchy_closed_value(self):
        # int f^2 = 1/(2 pi) for the standard Cauchy density
        assert coupled_entropy(CAUCHY) == pytest.approx((2 * math.pi - 1) / 2, rel=1e-12)

    def test_dual_path(self):
        assert coupled_entropy(CAUCHY) == pytest.approx(coupled_entropy_closed_form(CAUCHY), abs=1e-8)

    @pytest.mark.parametrize("sigma", SIGMAS)
    @pytest.mark.parametrize("kappa", KAPPAS)
    def test_dual_path_grid(self, kappa, sigma):
        p = CoupledParams(0, sigma, kappa, 2.0)
        assert coupled_entropy(p) == pytest.approx(coupled_entropy_closed_form(p), rel=1e-8)

    def test_small_coupling_limit(self):
        # kappa -> 0 gives the Shannon entropy of exp(-x^2/2)/sqrt(2 pi)
        expected = 0.5 * math.log(2 * math.pi * math.e)
        assert coupled_entropy(CoupledParams(0, 1, 1e-6, 2)) == pytest.approx(expected, abs=1e-3)

    def test_increases_with_coupling(self):
        values = [coupled_entropy(CoupledParams(0, 1, k, 2)) for k in KAPPAS]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert coupled_entropy(CoupledParams(0, 1, 0.5, 2)) < coupled_entropy(CAUCHY)

    def test_increases_with_scale(self):
        assert coupled_entropy(CoupledParams(0, 2, 1, 2)) > coupled_entropy(CAUCHY)

    def test_negative_coupling_rejected(self):
        with pytest.raises(DomainError):
            coupled_entropy(CoupledParams(0, 1, -0.3, 2))


class TestShannon:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0, 3.0])
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 10.0])
    def test_generalized_gaussian_oracle(self, alpha, sigma):
        # exp(-|x|^alpha / (alpha sigma^alpha)) is gennorm with scale sigma alpha^(1/alpha)
        expected = stats.gennorm(alpha, scale=sigma * alpha ** (1 / alpha)).entropy()
        got = coupled_entropy(CoupledParams(0, sigma, 0.0, alpha))
        assert got == pytest.approx(expected, abs=1e-10)

    def test_cauchy(self):
        assert shannon_entropy(CAUCHY) == pytest.approx(math.log(4 * math.pi), rel=1e-12)


class TestTsallisChain:
    def test_cauchy_values(self):
        rep = tsallis_entropies(CAUCHY)
        assert rep.q == 2.0
        assert rep.tsallis == pytest.approx(1 - 1 / (2 * math.pi), rel=1e-12)
        assert rep.normalized_tsallis == pytest.approx(2 * math.pi - 1, rel=1e-12)
        assert rep.coupled == pytest.approx((2 * math.pi - 1) / 2, rel=1e-12)
        assert rep.average_density == pytest.approx(1 / (2 * math.pi), rel=1e-12)

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    @pytest.mark.parametrize("sigma", SIGMAS)
    @pytest.mark.parametrize("kappa", KAPPAS)
    def test_chain(self, kappa, sigma, alpha):
        rep = tsallis_entropies(CoupledParams(0, sigma, kappa, alpha))
        assert rep.coupled * (1 + kappa) == pytest.approx(rep.normalized_tsallis, rel=1e-10, abs=1e-10)
        assert rep.normalized_tsallis * rep.power_integral == pytest.approx(rep.tsallis, rel=1e-10, abs=1e-10)
        assert rep.average_density > 0

    def test_tsallis_decreases_with_coupling(self):
        values = [tsallis_entropies(CoupledParams(0, 1, k, 2)).tsallis for k in KAPPAS]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_requires_positive_coupling(self):
        with pytest.raises(DomainError):
            tsallis_entropies(CoupledParams(0, 1, 0, 2))

    def test_report_matches_single_calls(self):
        p = CoupledParams(0, 2, 0.4, 2)
        rep = tsallis_entropies(p)
        assert rep.coupled == pytest.approx(coupled_entropy(p), rel=1e-14)
        assert rep.average_density == pytest.approx(average_density(p), rel=1e-14)
        assert np.isclose(rep.power_integral, power_integral(p), rtol=1e-14)
