"""Scale estimators for coupled Gaussians with known location.

Two population identities tie the scale to simple statistics of
``|X - mu|`` when X is a coupled Gaussian with coupling ``kappa > 0``:

* fractional moment:  sigma = sqrt(kappa) * E[|X - mu|^p]^(1/p),  p = (1 - kappa)/kappa,
  which becomes the geometric mean at kappa = 1;
* logarithmic average:  E[ln|X - mu|] = ln(sigma / (2 sqrt(kappa))) - H_{1/(2 kappa) - 1} / 2,
  so sigma = 2 sqrt(kappa) exp(H_{1/(2 kappa) - 1} / 2) * exp(E[ln|X - mu|]).

Plugging sample averages into either gives an estimator.  Only the second
is well behaved away from kappa = 1: the p-th sample moment has infinite
variance for kappa < 1/2 and for kappa > 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from . import quadrature
from .distribution import CoupledParams, _log_kernel, log_normalization
from .errors import DegenerateSampleError, DomainError
from .sampleset import SampleSet
from .special import harmonic_number

__all__ = [
    "SampleSet",
    "Method",
    "ScaleEstimate",
    "EstimatorMetrics",
    "GENMEAN_KAPPA_MIN",
    "geometric_mean",
    "log_geometric_mean",
    "geometric_prefactor",
    "generalized_mean_scale",
    "geometric_mean_scale",
    "estimate_scale",
    "log_average",
    "log_average_closed_form",
    "fractional_moment",
    "scale_identity_check",
    "estimator_metrics",
]

# (1 - kappa)/kappa exceeds 49 below this; powers of typical data leave float range.
GENMEAN_KAPPA_MIN = 0.02


class Method(str, Enum):
    GENERALIZED_MEAN = "generalized_mean"
    GEOMETRIC_MEAN = "geometric_mean"


@dataclass(frozen=True)
class ScaleEstimate:
    value: float
    method: Method
    n: int
    kappa_assumed: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class EstimatorMetrics:
    """Bias, variance and mean-square error of repeated estimates.

    ``mse`` is always ``variance + bias**2``.
    """

    bias: float
    variance: float
    mse: float
    mean: float
    n: int

    @property
    def std(self):
        return math.sqrt(self.variance)


def _log_distances(samples):
    d = samples.distances()
    zero = np.flatnonzero(d == 0)
    if zero.size:
        i = int(zero[0])
        raise DegenerateSampleError(i, float(samples.values[i]), samples.mu)
    return np.log(d)


def log_geometric_mean(samples):
    """Mean of ``ln|x_i - mu|``."""
    return float(np.mean(_log_distances(samples)))


def geometric_mean(samples):
    """Geometric mean of ``|x_i - mu|``, computed in log space."""
    return math.exp(log_geometric_mean(samples))


def _check_kappa(kappa):
    kappa = float(kappa)
    if not kappa > 0 or not math.isfinite(kappa):
        raise DomainError(f"scale estimation needs finite kappa > 0, got {kappa!r}")
    return kappa


def geometric_prefactor(kappa):
    """``2 sqrt(kappa) exp(H_{1/(2 kappa) - 1} / 2)``; exactly 1 at kappa = 1."""
    kappa = _check_kappa(kappa)
    return 2.0 * math.sqrt(kappa) * math.exp(0.5 * harmonic_number(0.5 / kappa - 1.0))


def generalized_mean_scale(samples, kappa):
    """``sqrt(kappa) * (mean |x_i - mu|^p)^(1/p)`` with ``p = (1 - kappa)/kappa``.

    At kappa = 1 this is the geometric mean.  Refuses kappa below
    ``GENMEAN_KAPPA_MIN``.
    """
    kappa = _check_kappa(kappa)
    if kappa < GENMEAN_KAPPA_MIN:
        raise DomainError(
            f"generalized-mean estimator needs kappa >= {GENMEAN_KAPPA_MIN}; "
            f"the power (1 - kappa)/kappa = {(1 - kappa) / kappa:.4g} overflows"
        )
    logs = _log_distances(samples)
    if kappa == 1.0:
        log_scale = float(np.mean(logs))
    else:
        p = (1.0 - kappa) / kappa
        log_mean_power = logsumexp(p * logs) - math.log(logs.size)
        log_scale = 0.5 * math.log(kappa) + log_mean_power / p
    return ScaleEstimate(math.exp(log_scale), Method.GENERALIZED_MEAN, len(samples), kappa)


def geometric_mean_scale(samples, kappa):
    """Geometric mean times the harmonic-number prefactor."""
    kappa = _check_kappa(kappa)
    value = geometric_prefactor(kappa) * geometric_mean(samples)
    return ScaleEstimate(value, Method.GEOMETRIC_MEAN, len(samples), kappa)


def estimate_scale(samples, kappa, method):
    method = Method(method)
    if method is Method.GEOMETRIC_MEAN:
        return geometric_mean_scale(samples, kappa)
    return generalized_mean_scale(samples, kappa)


def _check_identity_params(params):
    if not params.kappa > 0:
        raise DomainError(f"scale identities need kappa > 0, got {params.kappa!r}")
    if params.alpha != 2.0:
        raise DomainError(f"scale identities hold for coupled Gaussians (alpha = 2), got {params.alpha!r}")


def _expectation_of_distance(params, what, *, power=None):
    """``E[|X - mu|^power]`` (or ``E[ln|X - mu|]`` when power is None) by
    quadrature in the log-distance variable."""
    p = CoupledParams(0.0, params.sigma, params.kappa, params.alpha)
    log_z = log_normalization(p)

    def integrand(t):
        lf = float(_log_kernel(p, t)) - log_z
        lt = math.log(t)
        if power is None:
            return lt * math.exp(lf)
        return math.exp(power * lt + lf)

    return quadrature.quad_symmetric(integrand, scale=p.sigma, epsabs=1e-13, epsrel=1e-13, what=what)


def log_average(params):
    """``E[ln|X - mu|]`` by adaptive quadrature."""
    _check_identity_params(params)
    return _expectation_of_distance(params, "logarithmic average")


def log_average_closed_form(sigma, kappa):
    """``ln(sigma/(2 sqrt(kappa))) - H_{1/(2 kappa) - 1}/2``."""
    kappa = _check_kappa(kappa)
    return math.log(sigma / (2.0 * math.sqrt(kappa))) - 0.5 * harmonic_number(0.5 / kappa - 1.0)


def fractional_moment(params, power):
    """``E[|X - mu|^power]`` by adaptive quadrature.

    For a coupled Gaussian this is finite when ``-1 < power < 1/kappa``;
    the estimator power ``(1 - kappa)/kappa`` always lies in that range.
    """
    _check_identity_params(params)
    if not -1.0 < power < 1.0 / params.kappa:
        raise DomainError(
            f"E|X - mu|^{power} diverges for kappa={params.kappa} (needs -1 < power < {1.0 / params.kappa})"
        )
    return _expectation_of_distance(params, "fractional moment", power=power)


def scale_identity_check(params, which):
    """Scale implied by a population identity, evaluated by quadrature.

    ``which="fractional_moment"`` uses the moment of order (1-kappa)/kappa
    (the logarithmic average at kappa = 1); ``which="log_average"`` uses the
    logarithmic average with the harmonic-number prefactor.  Both return
    ``params.sigma`` up to quadrature error.
    """
    _check_identity_params(params)
    k = params.kappa
    if which == "log_average":
        return geometric_prefactor(k) * math.exp(log_average(params))
    if which != "fractional_moment":
        raise DomainError(f"unknown identity {which!r}; expected 'fractional_moment' or 'log_average'")
    if k == 1.0:
        return math.exp(log_average(params))
    p = (1.0 - k) / k
    return math.sqrt(k) * fractional_moment(params, p) ** (1.0 / p)


def estimator_metrics(estimates, true_sigma):
    """Bias, population variance and MSE of repeated estimates of ``true_sigma``."""
    values = np.array([float(e) for e in estimates], dtype=float)
    if values.size < 2:
        raise DomainError(f"estimator metrics need at least 2 estimates, got {values.size}")
    mean = float(values.mean())
    bias = mean - float(true_sigma)
    variance = float(values.var())
    return EstimatorMetrics(bias=bias, variance=variance, mse=variance + bias * bias, mean=mean, n=values.size)
