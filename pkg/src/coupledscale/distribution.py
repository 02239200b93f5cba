"""The coupled exponential family of distributions.

A family point is ``(mu, sigma, kappa, alpha)``: location, scale, coupling
and power.  The density is

    f(x) = (1 + kappa |x - mu|^alpha / sigma^alpha)_+ ^ (-(1 + kappa)/(alpha kappa)) / Z

which is the generalized Pareto law for ``alpha = 1`` and Student's t with
``nu = 1/kappa`` degrees of freedom for ``alpha = 2``.  At ``kappa = 0`` it is
the generalized Gaussian ``exp(-|x - mu|^alpha / (alpha sigma^alpha)) / Z``,
the continuous limit of the ``kappa > 0`` branch.

For ``kappa > 0`` the family is a gamma mixture of generalized Gaussians:
the inverse scale ``w = theta^(-alpha)`` is gamma distributed with shape
``1/(alpha kappa)`` and scale ``alpha kappa sigma^(-alpha)``.  The sampler
uses exactly this construction.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize
from scipy import special as _sp

from . import quadrature
from .errors import DomainError, NumericError
from .sampleset import SampleSet
from .special import log_beta

__all__ = [
    "CoupledParams",
    "GammaMixture",
    "SUPPORTED_SAMPLER_ALPHAS",
    "escort_index",
    "normalization",
    "log_normalization",
    "pdf",
    "log_pdf",
    "cdf",
    "sf",
    "quantile",
    "mixture_of",
    "make_rng",
    "standard_gamma",
    "sample",
    "sample_mixture",
    "relative_variance",
    "escort_pdf",
    "escort_scale",
    "integral_of_power",
]

SUPPORTED_SAMPLER_ALPHAS = (1.0, 2.0)
CDF_EPSABS = 1e-10
KAPPA_ZERO = 1e-300


@dataclass(frozen=True)
class CoupledParams:
    """A point ``(mu, sigma, kappa, alpha)`` of the coupled exponential family.

    A coupling of magnitude below ``KAPPA_ZERO`` is stored as exactly 0: every
    quantity of the family differs from the kappa = 0 member by O(kappa), and
    ``1/(alpha kappa)`` would overflow.
    """

    mu: float = 0.0
    sigma: float = 1.0
    kappa: float = 0.0
    alpha: float = 2.0

    def __post_init__(self):
        for name in ("mu", "sigma", "kappa", "alpha"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma!r}")
        if not 0 < self.alpha <= 3:
            raise DomainError(f"alpha must satisfy 0 < alpha <= 3, got {self.alpha!r}")
        if not self.kappa > -1:
            raise DomainError(f"kappa must be > -1, got {self.kappa!r}")
        if abs(self.kappa) < KAPPA_ZERO:
            object.__setattr__(self, "kappa", 0.0)

    @property
    def q(self):
        """Escort index ``1 + alpha*kappa/(1 + kappa)``."""
        return escort_index(self.kappa, self.alpha)

    @property
    def radius(self):
        """Half-width of the support around ``mu`` (infinite unless kappa < 0)."""
        if self.kappa >= 0:
            return math.inf
        return self.sigma * (-self.kappa) ** (-1.0 / self.alpha)

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class GammaMixture:
    """Gamma law of the fluctuating inverse scale ``theta^(-alpha)``."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise DomainError(f"gamma shape and scale must be > 0 ({self.shape!r}, {self.scale!r})")

    @property
    def mean(self):
        return self.shape * self.scale

    @property
    def variance(self):
        return self.shape * self.scale**2

    @property
    def relative_variance(self):
        return 1.0 / self.shape


def escort_index(kappa, alpha):
    return 1.0 + alpha * kappa / (1.0 + kappa)


def log_normalization(params):
    s, k, a = params.sigma, params.kappa, params.alpha
    if k > 0:
        return math.log(2.0 * s / a) - math.log(k) / a + log_beta(1.0 / (a * k), 1.0 / a)
    if k == 0:
        return math.log(2.0 * s) + math.log(a) / a + math.lgamma(1.0 + 1.0 / a)
    return math.log(2.0 * s / a) - math.log(-k) / a + log_beta(1.0 - (1.0 + k) / (a * k), 1.0 / a)


def normalization(params):
    """Normalizing constant ``Z(sigma, kappa, alpha)``.

    The kappa = 0 branch is ``2 sigma alpha^(1/alpha) Gamma(1 + 1/alpha)``,
    which keeps Z continuous as kappa -> 0.
    """
    return math.exp(log_normalization(params))


def _log_kernel(params, dist):
    """Log of the unnormalized density at distance ``dist = |x - mu|``."""
    k, a, s = params.kappa, params.alpha, params.sigma
    dist = np.asarray(dist, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        log_u = a * (np.log(dist) - math.log(s))
        if k > 0:
            # log1p(kappa*u) without overflowing u for huge distances
            log1p_ku = np.logaddexp(0.0, math.log(k) + log_u)
            return -(1.0 + k) / (a * k) * log1p_ku
        u = np.exp(log_u)
        if k == 0:
            return -u / a
        base = 1.0 + k * u
        inside = -(1.0 + k) / (a * k) * np.log1p(np.minimum(k * u, 0.0))
        return np.where(base > 0, inside, -np.inf)


def _as_output(out, like):
    if np.ndim(like) == 0:
        return float(out)
    return out


def _check_x(x):
    xa = np.asarray(x, dtype=float)
    if np.isnan(xa).any():
        raise DomainError("x must not be NaN")
    return xa


def log_pdf(params, x):
    """Log density; finite for distances far beyond where ``pdf`` underflows."""
    xa = _check_x(x)
    out = _log_kernel(params, np.abs(xa - params.mu)) - log_normalization(params)
    return _as_output(out, x)


def pdf(params, x):
    xa = _check_x(x)
    out = np.exp(_log_kernel(params, np.abs(xa - params.mu)) - log_normalization(params))
    return _as_output(out, x)


def _std_density(params):
    """Density as a function of the standardized distance ``t = |x - mu|/sigma``."""
    std = CoupledParams(0.0, 1.0, params.kappa, params.alpha)
    log_z = log_normalization(std)

    def density(t):
        return math.exp(float(_log_kernel(std, t)) - log_z)

    return density


def _tail_quadrature(params, d):
    """P(X - mu > sigma*d) for d >= 0 by adaptive quadrature."""
    g = _std_density(params)
    radius = params.radius / params.sigma
    if d >= radius:
        return 0.0
    if d <= 1.0 or math.isfinite(radius):
        inner = quadrature.quad(g, 0.0, d, epsabs=CDF_EPSABS / 2, what="cdf") if d > 0 else 0.0
        return 0.5 - inner
    return quadrature.quad_halfline(lambda s: g(d + s), scale=d, epsabs=CDF_EPSABS, what="cdf tail")


def _tail(params, d):
    """Upper tail probability beyond standardized distance ``d >= 0``."""
    k, a = params.kappa, params.alpha
    if a == 2.0 and k > 0:
        # Student's t with nu = 1/kappa.  stdtr evaluates the incomplete beta
        # I_{nu/(nu + d^2)}(nu/2, 1/2) without forming 1/(1 + kappa d^2), which
        # rounds to 1 for small kappa and loses the whole tail.
        return _sp.stdtr(1.0 / k, -np.asarray(d, dtype=float))
    if a == 1.0:
        if k == 0:
            return 0.5 * np.exp(-d)
        kd = np.maximum(k * np.asarray(d, dtype=float), -1.0)
        with np.errstate(divide="ignore"):
            return 0.5 * np.exp(-np.log1p(kd) / k)
    if k == 0:
        if a == 2.0:
            return 0.5 * _sp.erfc(d / math.sqrt(2.0))
        return 0.5 * _sp.gammaincc(1.0 / a, d**a / a)
    flat = np.atleast_1d(d).astype(float)
    out = np.array([_tail_quadrature(params, float(v)) for v in flat.ravel()])
    return out.reshape(np.shape(d))


def _split(params, x):
    xa = _check_x(x)
    t = (xa - params.mu) / params.sigma
    tail = np.asarray(_tail(params, np.abs(t)), dtype=float)
    return t, tail


def cdf(params, x):
    """Cumulative distribution function.

    Closed forms cover alpha = 2 with kappa > 0 (regularized incomplete beta),
    every alpha = 1 member and every kappa = 0 member; the rest fall back on
    adaptive quadrature of the density (absolute tolerance 1e-10).
    """
    t, tail = _split(params, x)
    out = np.where(t < 0, tail, 1.0 - tail)
    return _as_output(out, x)


def sf(params, x):
    """Survival function ``1 - cdf``, accurate deep in the upper tail."""
    t, tail = _split(params, x)
    out = np.where(t < 0, 1.0 - tail, tail)
    return _as_output(out, x)


def _standard_quantile(params, p):
    """Standardized quantile for ``p < 1/2`` (returns a negative number)."""
    k, a = params.kappa, params.alpha
    if a == 2.0 and k > 0:
        # stdtrit alone is good to ~1e-11; polish with Newton steps on stdtr
        nu = 1.0 / k
        t = float(_sp.stdtrit(nu, p))
        unit = CoupledParams(0.0, 1.0, k, 2.0)
        for _ in range(2):
            dens = math.exp(float(log_pdf(unit, t)))
            if not dens > 0:
                break
            t -= (float(_sp.stdtr(nu, t)) - p) / dens
        return t
    if a == 1.0:
        if k == 0:
            return math.log(2.0 * p)
        return -math.expm1(-k * math.log(2.0 * p)) / k
    if k == 0 and a == 2.0:
        return float(_sp.ndtri(p))

    radius = params.radius / params.sigma

    def gap(d):
        return float(_tail(params, d)) - p

    hi = 1.0
    while gap(hi) > 0:
        hi *= 2.0
        if hi > radius:
            hi = radius
            break
        if hi > 1e300:
            raise NumericError("quantile bracket search failed", p=p, params=params)
    lo = 0.0
    d = optimize.brentq(gap, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return -d


def quantile(params, p):
    """Inverse CDF for ``0 < p < 1``; ``quantile(0.5)`` is exactly ``mu``."""
    p = float(p)
    if not 0 < p < 1:
        raise DomainError(f"quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return params.mu
    if p < 0.5:
        return params.mu + params.sigma * _standard_quantile(params, p)
    return params.mu - params.sigma * _standard_quantile(params, 1.0 - p)


def mixture_of(params):
    """Gamma law of the inverse scale ``theta^(-alpha)`` for ``kappa > 0``."""
    k, a, s = params.kappa, params.alpha, params.sigma
    if not k > 0:
        raise DomainError(f"a gamma-mixture representation needs kappa > 0, got {k!r}")
    return GammaMixture(shape=1.0 / (a * k), scale=a * k * s ** (-a))


def make_rng(seed):
    """A numpy Generator from an int, a tuple of ints or a SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        seed = list(seed)
    return np.random.default_rng(seed)


def _log_standard_gamma(rng, shape, n):
    """Log of ``n`` standard gamma variates.

    Marsaglia & Tsang (2000) squeeze/rejection for shape >= 1.  For shape < 1
    the boost ``G(a) = G(a + 1) * U^(1/a)`` is applied in log space, since
    ``U^(1/a)`` underflows for small shapes (shape 0.05 means ``U^20``).
    """
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        want = n - filled
        m = int(want * 1.05) + 16
        z = rng.standard_normal(m)
        u = rng.random(m)
        v = 1.0 + c * z
        ok = v > 0
        v = np.where(ok, v, 1.0) ** 3
        with np.errstate(divide="ignore"):
            log_u = np.log(u)
        accept = ok & (log_u < 0.5 * z * z + d - d * v + d * np.log(v))
        got = np.log(d * v[accept])[:want]
        out[filled:filled + got.size] = got
        filled += got.size
    if boost:
        u = rng.random(n)
        # guard log(0); random() is in [0, 1)
        out += np.log(np.where(u > 0, u, np.finfo(float).tiny)) / shape
    return out


def standard_gamma(shape, n, seed):
    """``n`` gamma(shape, 1) variates; valid for any shape > 0."""
    if not shape > 0:
        raise DomainError(f"gamma shape must be > 0, got {shape!r}")
    return np.exp(_log_standard_gamma(make_rng(seed), float(shape), int(n)))


def _check_sampler(params, n):
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    if params.kappa < 0:
        raise DomainError("sampling is only supported for kappa >= 0")
    if params.alpha not in SUPPORTED_SAMPLER_ALPHAS:
        raise NotImplementedError(
            f"sampling supports alpha in {SUPPORTED_SAMPLER_ALPHAS}, got {params.alpha!r}"
        )


def sample_mixture(params, n, seed):
    """Draw ``n`` values plus the inverse scales ``w = theta^(-alpha)`` used.

    For kappa > 0, ``w`` is gamma distributed (see :func:`mixture_of`) and
    each value is a generalized Gaussian draw with that inverse scale: a
    centred normal of standard deviation ``w^(-1/2)`` for alpha = 2, a Laplace
    law of rate ``w`` for alpha = 1.  For kappa = 0 ``w`` is the constant
    ``sigma^(-alpha)``.
    """
    _check_sampler(params, n)
    n = int(n)
    rng = make_rng(seed)
    mu, s, k, a = params.mu, params.sigma, params.kappa, params.alpha
    if k == 0:
        log_w = np.full(n, -a * math.log(s))
    else:
        mix = mixture_of(params)
        log_w = _log_standard_gamma(rng, mix.shape, n) + math.log(mix.scale)
    if a == 2.0:
        x = mu + rng.standard_normal(n) * np.exp(-0.5 * log_w)
    else:
        x = mu + rng.laplace(0.0, 1.0, n) * np.exp(-log_w)
    return x, np.exp(log_w)


def sample(params, n, seed):
    """``n`` draws from the family as a :class:`SampleSet`; deterministic per seed."""
    x, _ = sample_mixture(params, n, seed)
    return SampleSet(x, params.mu)


def relative_variance(values):
    """``Var(X)/Mean(X)^2`` with the population variance."""
    v = np.asarray(values, dtype=float)
    m = v.mean()
    return float(v.var() / (m * m))


def integral_of_power(params, power, moment=0.0):
    """``int |x - mu|^moment f(x)^power dx`` by quadrature."""
    return _integral_of_power(params.replace(mu=0.0), float(power), float(moment))


@functools.lru_cache(maxsize=256)
def _integral_of_power(params, power, moment):
    log_z = log_normalization(params)

    def integrand(t):
        log_val = power * (float(_log_kernel(params, t)) - log_z)
        if moment:
            log_val += moment * math.log(t)
        return math.exp(log_val)

    return quadrature.quad_symmetric(
        integrand, scale=params.sigma, radius=params.radius, epsabs=1e-13, epsrel=1e-13,
        what=f"integral of f^{power}",
    )


def _check_escort(params):
    if not params.kappa > 0:
        raise DomainError(f"escort operations need kappa > 0, got {params.kappa!r}")


def escort_pdf(params, x):
    """Normalized escort density ``f^q / int f^q`` with ``q = 1 + alpha kappa/(1 + kappa)``."""
    _check_escort(params)
    q = params.q
    log_norm = math.log(integral_of_power(params, q))
    out = np.exp(q * np.asarray(log_pdf(params, x)) - log_norm)
    return _as_output(out, x)


def escort_scale(params):
    """Scale recovered from the escort constraint
    ``sigma^alpha = int |x - mu|^alpha f^q / int f^q``."""
    _check_escort(params)
    q, a = params.q, params.alpha
    num = integral_of_power(params, q, moment=a)
    den = integral_of_power(params, q)
    return (num / den) ** (1.0 / a)
