"""Coupled, Tsallis and normalized Tsallis entropies and the average density.

With ``q = 1 + alpha kappa/(1 + kappa)`` and ``I = int f^q dx``:

* Tsallis entropy          S_T  = (1 - I) / (q - 1)
* normalized Tsallis       S_NT = S_T / I
* coupled entropy          S_C  = S_NT / (1 + kappa) = (1/I - 1) / (alpha kappa)
* average density          f_avg = I^((1 + kappa)/(alpha kappa))

so that ``S_C = (1/alpha) ln_kappa(f_avg^(-alpha/(1 + kappa)))``; every entropy
tends to the Shannon differential entropy as kappa -> 0.  For coupled
Gaussians (alpha = 2) the average density equals ``f(mu + sigma)``, which
gives a closed form used as an independent cross-check of the quadrature.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from . import quadrature
from .distribution import CoupledParams, _log_kernel, log_normalization, pdf
from .errors import DomainError

__all__ = [
    "EntropyReport",
    "power_integral",
    "average_density",
    "average_density_closed_form",
    "coupled_entropy",
    "coupled_entropy_closed_form",
    "shannon_entropy",
    "tsallis_entropies",
]


@dataclass(frozen=True)
class EntropyReport:
    coupled: float
    tsallis: float
    normalized_tsallis: float
    average_density: float
    power_integral: float
    q: float


def _centered(params):
    return CoupledParams(0.0, params.sigma, params.kappa, params.alpha)


@functools.lru_cache(maxsize=256)
def _excess_power_integral(params, eps):
    """``int f^(1+eps) - 1`` evaluated as ``int f * expm1(eps * ln f)``.

    Integrating the excess directly keeps full relative precision when
    ``eps`` is tiny, where ``int f^(1+eps)`` itself is 1 to many digits.
    """
    log_z = log_normalization(params)

    def integrand(t):
        lf = float(_log_kernel(params, t)) - log_z
        return math.exp(lf) * math.expm1(eps * lf)

    return quadrature.quad_symmetric(
        integrand, scale=params.sigma, radius=params.radius, epsabs=1e-15, epsrel=1e-12,
        what="excess power integral",
    )


def _check_kappa(params):
    if params.kappa < 0:
        raise DomainError(f"entropies are defined here for kappa >= 0, got {params.kappa!r}")


def power_integral(params):
    """``I = int f^q dx`` with the escort index ``q``; equals 1 at kappa = 0."""
    _check_kappa(params)
    eps = params.q - 1.0
    return 1.0 + _excess_power_integral(_centered(params), eps) if eps else 1.0


@functools.lru_cache(maxsize=256)
def shannon_entropy(params):
    """Differential entropy ``-int f ln f`` by quadrature."""
    p = _centered(params)
    log_z = log_normalization(p)

    def integrand(t):
        lf = float(_log_kernel(p, t)) - log_z
        if lf == -math.inf:
            return 0.0
        return -math.exp(lf) * lf

    return quadrature.quad_symmetric(integrand, scale=p.sigma, radius=p.radius, epsabs=1e-13,
                                     epsrel=1e-12, what="shannon entropy")


def average_density(params):
    """Generalized mean of the density over itself, ``I^((1+kappa)/(alpha kappa))``.

    At kappa = 0 this is ``exp(-H)`` with H the Shannon entropy.
    """
    _check_kappa(params)
    k, a = params.kappa, params.alpha
    if k == 0:
        return math.exp(-shannon_entropy(params))
    excess = _excess_power_integral(_centered(params), params.q - 1.0)
    return math.exp((1.0 + k) / (a * k) * math.log1p(excess))


def average_density_closed_form(params):
    """``f(mu + sigma)``, the average density of a coupled Gaussian (alpha = 2)."""
    if params.alpha != 2.0 or not params.kappa > 0:
        raise DomainError("closed-form average density needs alpha = 2 and kappa > 0")
    return pdf(params, params.mu + params.sigma)


def _coupled_from_excess(excess, kappa, alpha):
    # (1/I - 1)/(alpha kappa) with I = 1 + excess
    return -excess / ((1.0 + excess) * alpha * kappa)


def coupled_entropy(params):
    """Coupled entropy ``(1/I - 1)/(alpha kappa)``; Shannon entropy at kappa = 0."""
    _check_kappa(params)
    if params.kappa == 0:
        return shannon_entropy(params)
    excess = _excess_power_integral(_centered(params), params.q - 1.0)
    return _coupled_from_excess(excess, params.kappa, params.alpha)


def coupled_entropy_closed_form(params):
    """Coupled entropy of a coupled Gaussian via ``f_avg = f(mu + sigma)``."""
    k, a = params.kappa, params.alpha
    f_avg = average_density_closed_form(params)
    log_i = a * k / (1.0 + k) * math.log(f_avg)
    return math.expm1(-log_i) / (a * k)


def tsallis_entropies(params):
    """All three entropies plus the average density for kappa > 0."""
    if not params.kappa > 0:
        raise DomainError(f"tsallis_entropies needs kappa > 0, got {params.kappa!r}")
    k, a, q = params.kappa, params.alpha, params.q
    excess = _excess_power_integral(_centered(params), q - 1.0)
    integral = 1.0 + excess
    tsallis = -excess / (q - 1.0)
    normalized = tsallis / integral
    coupled = normalized / (1.0 + k)
    f_avg = math.exp((1.0 + k) / (a * k) * math.log1p(excess))
    return EntropyReport(
        coupled=coupled,
        tsallis=tsallis,
        normalized_tsallis=normalized,
        average_density=f_avg,
        power_integral=integral,
        q=q,
    )
