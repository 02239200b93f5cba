"""Cramer-von Mises goodness of fit and the (kappa, sigma) search.

Given the geometric mean ``G`` of ``|x_i - mu|``, the scale of a coupled
Gaussian follows from the coupling as ``sigma(kappa) = prefactor(kappa) * G``,
so choosing the best-fitting pair is a one-dimensional search over kappa.
Each candidate is scored by the CVM p-value; a log-spaced grid locates the
best region and a golden-section search refines it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special as _sp

from .distribution import CoupledParams, cdf, make_rng, sample
from .errors import CoupledError, DomainError
from .estimators import geometric_mean, geometric_prefactor

__all__ = [
    "PValueMethod",
    "CvmResult",
    "TraceEntry",
    "SearchConfig",
    "FitResult",
    "cvm_statistic",
    "cvm_statistic_from_uniforms",
    "cvm_asymptotic_sf",
    "bootstrap_null",
    "cvm_pvalue",
    "fit_kappa_sigma",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class PValueMethod(str, Enum):
    BOOTSTRAP = "bootstrap"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class CvmResult:
    statistic: float
    p_value: float
    n: int
    method: PValueMethod


@dataclass(frozen=True)
class TraceEntry:
    kappa: float
    sigma: float
    statistic: float
    p_value: float
    stage: str
    error: str = ""

    @property
    def ok(self):
        return not self.error


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of :func:`fit_kappa_sigma`.

    The kappa range and grid resolution are implementation choices; the
    defaults cover couplings from nearly Gaussian to extremely heavy tails.
    """

    kappa_min: float = 0.02
    kappa_max: float = 20.0
    grid: int = 50
    replicates: int = 999
    seed: int = 0
    method: PValueMethod = PValueMethod.BOOTSTRAP
    p_floor: float = 1e-4
    max_samples: int | None = None
    refine_tol: float = 1e-4
    refine_maxiter: int = 60

    def __post_init__(self):
        if not 0 < self.kappa_min < self.kappa_max:
            raise DomainError(f"need 0 < kappa_min < kappa_max ({self.kappa_min}, {self.kappa_max})")
        if self.grid < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.grid}")
        object.__setattr__(self, "method", PValueMethod(self.method))
        if self.method is PValueMethod.BOOTSTRAP and self.replicates < 99:
            raise DomainError(f"bootstrap needs at least 99 replicates, got {self.replicates}")


@dataclass(frozen=True)
class FitResult:
    """Best ``(kappa, sigma)`` pair with its CVM result and the full trace.

    ``tail_p_value`` equals ``best.p_value`` unless the best statistic lies
    beyond every bootstrap replicate; the bootstrap then only bounds p by
    ``1/(replicates + 1)`` and the limiting law resolves the tail instead.
    ``converged`` compares ``tail_p_value`` with the search floor.
    """

    kappa_hat: float
    sigma_hat: float
    best: CvmResult
    trace: list = field(default_factory=list)
    converged: bool = False
    geometric_mean: float = math.nan
    n: int = 0
    tail_p_value: float = math.nan

    @property
    def p_value(self):
        return self.best.p_value


def _plotting_positions(n):
    return (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)


def cvm_statistic_from_uniforms(u_sorted):
    """W^2 of sorted probability-integral-transformed values."""
    n = u_sorted.size
    dev = _plotting_positions(n) - u_sorted
    return float(1.0 / (12.0 * n) + np.dot(dev, dev))


def _sorted_statistic(x_sorted, params):
    return cvm_statistic_from_uniforms(np.asarray(cdf(params, x_sorted), dtype=float))


def cvm_statistic(samples, params):
    """Cramer-von Mises W^2 = 1/(12n) + sum(((2i - 1)/(2n) - F(x_(i)))^2)."""
    return _sorted_statistic(np.sort(samples.values), params)


def cvm_asymptotic_sf(w2, terms=25):
    """Upper tail of the limiting null distribution of W^2.

    Uses the Anderson-Darling (1952) series

        P(W^2 <= x) = 1/(pi sqrt(x)) sum_j  Gamma(j + 1/2)/(Gamma(1/2) j!) sqrt(4j + 1)
                                            exp(-u_j) K_{1/4}(u_j),   u_j = (4j + 1)^2/(16 x).
    """
    w2 = float(w2)
    if w2 <= 0:
        return 1.0
    total = 0.0
    coef = 1.0
    for j in range(terms):
        if j:
            coef *= (j - 0.5) / j
        u = (4 * j + 1) ** 2 / (16.0 * w2)
        if u > 700:
            break
        # kve(v, u) = K_v(u) exp(u)
        total += coef * math.sqrt(4 * j + 1) * _sp.kve(0.25, u) * math.exp(-2.0 * u)
    cdf_value = total / (math.pi * math.sqrt(w2))
    return min(1.0, max(0.0, 1.0 - cdf_value))


def _replicate_rng(seed, *path):
    return make_rng((int(seed), *map(int, path)))


def bootstrap_null(n, replicates, seed):
    """Sorted null replicates of W^2 for a fully specified continuous model.

    With the parameters fixed, ``F(X)`` is uniform whatever the model, so the
    null law of W^2 depends on ``n`` only; replicate ``r`` uses uniforms from
    the generator seeded by ``(seed, n, r)``.
    """
    stats = np.empty(int(replicates))
    for r in range(int(replicates)):
        u = np.sort(_replicate_rng(seed, n, r).random(int(n)))
        stats[r] = cvm_statistic_from_uniforms(u)
    stats.sort()
    return stats


def _bootstrap_p(observed, null_sorted):
    exceed = null_sorted.size - np.searchsorted(null_sorted, observed, side="left")
    return (1.0 + exceed) / (null_sorted.size + 1.0)


def cvm_pvalue(samples, params, method="bootstrap", replicates=999, seed=0):
    """CVM statistic and p-value of ``samples`` against ``params``.

    The bootstrap draws each replicate sample from ``params`` itself (seed
    ``(seed, r)``) and reports ``(1 + #{W^2_r >= W^2})/(replicates + 1)``.
    The asymptotic method uses the limiting distribution.
    """
    method = PValueMethod(method)
    observed = cvm_statistic(samples, params)
    n = len(samples)
    if method is PValueMethod.ASYMPTOTIC:
        return CvmResult(observed, cvm_asymptotic_sf(observed), n, method)
    if replicates < 99:
        raise DomainError(f"bootstrap needs at least 99 replicates, got {replicates}")
    null = np.empty(int(replicates))
    for r in range(int(replicates)):
        rep = sample(params, n, _replicate_rng(seed, r))
        null[r] = cvm_statistic(rep, params)
    null.sort()
    return CvmResult(observed, float(_bootstrap_p(observed, null)), n, method)


class _Scorer:
    """Evaluates candidate couplings against one fixed sample."""

    def __init__(self, samples, config):
        self.mu = samples.mu
        self.x_sorted = np.sort(samples.values)
        self.n = self.x_sorted.size
        self.g = geometric_mean(samples)
        self.config = config
        self.null = None
        if config.method is PValueMethod.BOOTSTRAP:
            self.null = bootstrap_null(self.n, config.replicates, config.seed)
        self.trace = []

    def sigma_for(self, kappa):
        return geometric_prefactor(kappa) * self.g

    def __call__(self, kappa, stage):
        sigma = math.nan
        try:
            sigma = self.sigma_for(kappa)
            params = CoupledParams(self.mu, sigma, kappa, 2.0)
            w2 = _sorted_statistic(self.x_sorted, params)
            if self.null is not None:
                p = float(_bootstrap_p(w2, self.null))
            else:
                p = cvm_asymptotic_sf(w2)
            entry = TraceEntry(kappa, sigma, w2, p, stage)
        except (CoupledError, ArithmeticError, ValueError) as exc:
            entry = TraceEntry(kappa, sigma, math.nan, math.nan, stage, error=f"{type(exc).__name__}: {exc}")
        self.trace.append(entry)
        return entry


def _rank(entry):
    # larger p first, then smaller W^2, then the lighter tail
    if not entry.ok:
        return (1, 0.0, 0.0, entry.kappa)
    return (0, -entry.p_value, entry.statistic, entry.kappa)


def _golden_refine(score, lo, hi, config):
    """Golden-section minimisation of W^2 over log-kappa in ``[lo, hi]``."""

    def objective(log_k):
        entry = score(math.exp(log_k), "refine")
        return entry.statistic if entry.ok else math.inf

    a, b = math.log(lo), math.log(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    for _ in range(config.refine_maxiter):
        if abs(b - a) < config.refine_tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)


def fit_kappa_sigma(samples, search=None):
    """Fit ``(kappa, sigma)`` of a coupled Gaussian with known location.

    Every candidate sets ``sigma = prefactor(kappa) * G`` from the same
    geometric mean ``G``, so the trace satisfies that constraint exactly.
    Candidates whose CDF fails are recorded in the trace with the error and
    skipped.  ``converged`` is False when the best p-value (tail-resolved, see
    :class:`FitResult`) is below ``search.p_floor``.
    """
    config = search or SearchConfig()
    if config.max_samples is not None and len(samples) > config.max_samples:
        samples = samples.head(config.max_samples)
    score = _Scorer(samples, config)

    grid = np.geomspace(config.kappa_min, config.kappa_max, config.grid)
    grid_entries = [score(float(k), "grid") for k in grid]
    best_grid = min(grid_entries, key=_rank)

    if best_grid.ok:
        i = grid_entries.index(best_grid)
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, grid.size - 1)]
        _golden_refine(score, float(lo), float(hi), config)

    best = min(score.trace, key=_rank)
    if best.ok:
        tail_p = best.p_value
        if score.null is not None and best.statistic > score.null[-1]:
            tail_p = min(tail_p, cvm_asymptotic_sf(best.statistic))
    if not best.ok:
        return FitResult(
            kappa_hat=math.nan,
            sigma_hat=math.nan,
            best=CvmResult(math.nan, math.nan, score.n, config.method),
            trace=list(score.trace),
            converged=False,
            geometric_mean=score.g,
            n=score.n,
        )
    return FitResult(
        kappa_hat=best.kappa,
        sigma_hat=best.sigma,
        best=CvmResult(best.statistic, best.p_value, score.n, config.method),
        trace=list(score.trace),
        converged=tail_p >= config.p_floor,
        geometric_mean=score.g,
        n=score.n,
        tail_p_value=tail_p,
    )
