"""Scalar special functions: deformed exponential/logarithm, harmonic
numbers of real argument, log-gamma, digamma, log-beta and the regularized
incomplete beta function.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError

__all__ = [
    "EULER_GAMMA",
    "KAPPA_SWITCH",
    "coupled_exp",
    "coupled_log",
    "harmonic_number",
    "log_gamma",
    "lgamma_ratio",
    "digamma",
    "log_beta",
    "regularized_incomplete_beta",
]

EULER_GAMMA = 0.57721566490153286060651209008240243

# Below this |kappa| the deformed functions use their second-order expansion
# about kappa = 0.
KAPPA_SWITCH = 1e-10

# Bernoulli-number coefficients B_2k / (2k) for the digamma asymptotic series.
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_DIGAMMA_SHIFT = 10.0

# B_2k / (2k (2k - 1)) for the Stirling series of log-gamma.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
)
_STIRLING_MIN = 20.0

_HARMONIC_EXACT_MAX = 10_000


def _check_finite(name, value):
    if isinstance(value, np.ndarray):
        if np.isnan(value).any():
            raise DomainError(f"{name} contains NaN")
    elif value != value:  # NaN
        raise DomainError(f"{name} is NaN")


def _scalar_or_array(result, like):
    if np.ndim(like) == 0:
        return float(result)
    return result


def coupled_exp(x, kappa, a=1.0):
    """Deformed exponential ``(1 + kappa*x)_+ ** (a/kappa)``.

    Reduces to ``exp(a*x)`` at ``kappa = 0``.  When the clamped base is zero
    and ``a/kappa < 0`` the result is ``+inf`` (the pole of the power
    function), which lets density code treat the support edge uniformly.
    """
    _check_finite("kappa", kappa)
    _check_finite("a", a)
    if not (math.isfinite(kappa) and math.isfinite(a)):
        raise DomainError(f"kappa and a must be finite (kappa={kappa!r}, a={a!r})")
    xa = np.asarray(x, dtype=float)
    _check_finite("x", xa)

    if abs(kappa) < KAPPA_SWITCH:
        out = np.exp(a * (xa - 0.5 * kappa * xa * xa))
        return _scalar_or_array(out, x)

    power = a / kappa
    base = 1.0 + kappa * xa
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inside = np.exp(power * np.log1p(kappa * xa))
    if power < 0:
        edge = np.inf
    elif power > 0:
        edge = 0.0
    else:
        edge = 1.0
    out = np.where(base > 0, inside, edge)
    return _scalar_or_array(out, x)


def coupled_log(x, kappa):
    """Deformed logarithm ``(x**kappa - 1)/kappa``, the inverse of
    ``coupled_exp(., kappa, 1)``.  ``x`` must be positive."""
    _check_finite("kappa", kappa)
    xa = np.asarray(x, dtype=float)
    _check_finite("x", xa)
    if np.any(xa <= 0):
        raise DomainError("coupled_log requires x > 0")
    lx = np.log(xa)
    if abs(kappa) < KAPPA_SWITCH:
        out = lx + 0.5 * kappa * lx * lx
    else:
        out = np.expm1(kappa * lx) / kappa
    return _scalar_or_array(out, x)


def digamma(x):
    """Digamma function psi(x) for x > 0.

    Arguments below 10 are shifted up with psi(x) = psi(x + 1) - 1/x before
    the asymptotic series is applied.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"digamma requires finite x > 0, got {x!r}")
    acc = 0.0
    while x < _DIGAMMA_SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for c in _DIGAMMA_ASYMPTOTIC:
        series += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def harmonic_number(a):
    """Harmonic number H_a for real a > -1.

    Equal to the integral of (1 - t**a)/(1 - t) over [0, 1].  Non-negative
    integers use the exact partial sum; everything else uses
    H_a = psi(a + 1) + gamma.
    """
    a = float(a)
    if not math.isfinite(a) or a <= -1.0:
        raise DomainError(f"harmonic_number requires a > -1, got {a!r}")
    if a.is_integer() and 0 <= a <= _HARMONIC_EXACT_MAX:
        return math.fsum(1.0 / k for k in range(1, int(a) + 1))
    return digamma(a + 1.0) + EULER_GAMMA


def log_gamma(a):
    """Natural log of the gamma function for a > 0."""
    a = float(a)
    if not a > 0 or not math.isfinite(a):
        raise DomainError(f"log_gamma requires finite a > 0, got {a!r}")
    return math.lgamma(a)


def _stirling_correction(x):
    inv2 = 1.0 / (x * x)
    acc = 0.0
    power = 1.0 / x
    for c in _STIRLING:
        acc += c * power
        power *= inv2
    return acc


def lgamma_ratio(a, b):
    """log(Gamma(a + b) / Gamma(a)) without cancellation for large ``a``."""
    a = float(a)
    b = float(b)
    if not (a > 0 and a + b > 0):
        raise DomainError(f"lgamma_ratio requires a > 0 and a + b > 0 (a={a!r}, b={b!r})")
    if a < _STIRLING_MIN or a + b < _STIRLING_MIN:
        return math.lgamma(a + b) - math.lgamma(a)
    # (a+b-1/2) ln(a+b) - (a-1/2) ln a - b, rearranged around log1p(b/a)
    main = (a - 0.5) * math.log1p(b / a) + b * math.log(a + b) - b
    return main + _stirling_correction(a + b) - _stirling_correction(a)


def log_beta(a, b):
    """log B(a, b) for a, b > 0, stable when one argument is large."""
    a = float(a)
    b = float(b)
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"log_beta requires a, b > 0 (a={a!r}, b={b!r})")
    big, small = (a, b) if a >= b else (b, a)
    return math.lgamma(small) - lgamma_ratio(big, small)


def regularized_incomplete_beta(x, a, b):
    """Regularized incomplete beta I_x(a, b); vectorized over ``x``."""
    if not (a > 0 and b > 0):
        raise DomainError(f"incomplete beta requires a, b > 0 (a={a!r}, b={b!r})")
    xa = np.asarray(x, dtype=float)
    _check_finite("x", xa)
    if np.any((xa < 0) | (xa > 1)):
        raise DomainError("incomplete beta requires 0 <= x <= 1")
    out = _sp.betainc(a, b, xa)
    return _scalar_or_array(out, x)
