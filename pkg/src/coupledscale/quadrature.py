"""Adaptive quadrature helpers built on QUADPACK (``scipy.integrate.quad``).

Heavy-tailed integrands decay like a power of the distance, which QUADPACK's
infinite-interval map handles poorly when the power is close to -1.  Half-line
integrals are therefore taken in the log-distance variable ``t = c*exp(s)``,
turning algebraic decay into exponential decay.
"""

from __future__ import annotations

import math
import warnings

from scipy import integrate

from .errors import NumericError

DEFAULT_EPSABS = 1e-10
DEFAULT_EPSREL = 1e-12
_LIMIT = 1000


def quad(func, lo, hi, *, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL, points=None, what="integral"):
    """Integrate ``func`` over ``[lo, hi]``; raise NumericError on failure.

    A QUADPACK warning is tolerated when the reported error estimate is still
    within ten times the requested tolerance.
    """
    kwargs = dict(epsabs=epsabs, epsrel=epsrel, limit=_LIMIT, full_output=1)
    if points is not None and math.isfinite(lo) and math.isfinite(hi):
        kwargs["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = integrate.quad(func, lo, hi, **kwargs)
    value, abserr = res[0], res[1]
    if not math.isfinite(value):
        raise NumericError(f"{what}: quadrature produced a non-finite value", lo=lo, hi=hi)
    if len(res) > 3:
        budget = 10.0 * max(epsabs, epsrel * abs(value))
        if abserr > budget:
            raise NumericError(
                f"{what}: quadrature did not converge",
                lo=lo,
                hi=hi,
                value=value,
                abserr=abserr,
                message=res[3].splitlines()[0] if res[3] else "",
            )
    return value


def quad_halfline(func, *, scale=1.0, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL, what="integral"):
    """Integrate ``func(t)`` over ``t in (0, inf)`` via ``t = scale*exp(s)``."""

    def in_log(s):
        if s > 700.0:
            return 0.0
        t = scale * math.exp(s)
        if t == 0.0 or not math.isfinite(t):
            return 0.0
        return func(t) * t

    lower = quad(in_log, -math.inf, 0.0, epsabs=epsabs / 2, epsrel=epsrel, what=what)
    upper = quad(in_log, 0.0, math.inf, epsabs=epsabs / 2, epsrel=epsrel, what=what)
    return lower + upper


def quad_symmetric(func_of_distance, *, scale=1.0, radius=math.inf, epsabs=DEFAULT_EPSABS,
                   epsrel=DEFAULT_EPSREL, what="integral"):
    """Integrate an even integrand over the real line, given as a function of
    the distance ``t = |x - mu|`` from its centre.

    ``radius`` bounds a compact support; the integrand is assumed zero beyond.
    """
    if math.isfinite(radius):
        half = quad(func_of_distance, 0.0, radius, epsabs=epsabs / 2, epsrel=epsrel,
                    points=[min(scale, radius / 2)], what=what)
    else:
        half = quad_halfline(func_of_distance, scale=scale, epsabs=epsabs / 2, epsrel=epsrel, what=what)
    return 2.0 * half

