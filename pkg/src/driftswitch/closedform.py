"""Closed-form quantities for the drift-switching problems on [0, 1].

All formulas are for the unit-noise normalisation (sigma = 1); callers handle
other noise scales by the time-change reduction in the solver module.
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np

from .model import NonPositiveParameter, OutOfDomain, _require_positive

ArrayLike = Union[float, np.ndarray]

# below this drift magnitude the exit-time formula is evaluated by series
_SMALL_NU = 1e-8
# above this the exp-difference forms are used to dodge overflow
_LARGE_ARG = 300.0


def _check_unit_interval(x: np.ndarray) -> None:
    if x.size and (np.min(x) < 0.0 or np.max(x) > 1.0 or not np.all(np.isfinite(x))):
        raise OutOfDomain("x must lie in [0, 1]")


def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    # keep wider float dtypes so callers can evaluate in extended precision
    arr = np.asarray(x)
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(float)
    return arr, arr.ndim == 0


def expected_exit_time(nu: float, x: ArrayLike) -> ArrayLike:
    """Mean exit time from ]0, 1[ of a unit-noise diffusion with constant drift nu.

    f_nu(x) = -x/nu + (1 - exp(-2 nu x)) / (nu (1 - exp(-2 nu))), continuously
    extended by x(1 - x) at nu = 0.  Vectorised over x.
    """
    nu = float(nu)
    if not math.isfinite(nu):
        raise OutOfDomain(f"nu must be finite, got {nu!r}")
    arr, scalar = _as_array(x)
    _check_unit_interval(arr)
    if abs(nu) < _SMALL_NU:
        # second-order expansion around nu = 0; error O(nu^3)
        out = arr * (1.0 - arr) * (1.0 + nu * (1.0 - 2.0 * arr) / 3.0) \
            - (nu * nu / 3.0) * (arr * (1.0 - arr)) ** 2
    elif nu > 0.0:
        # only negative exponents: stable for arbitrarily large nu
        den = np.expm1(-2.0 * nu)
        out = (np.expm1(-2.0 * nu * arr) - arr * den) / (nu * den)
    else:
        return expected_exit_time(-nu, 1.0 - arr) if not scalar \
            else float(expected_exit_time(-nu, 1.0 - float(arr)))
    return float(out) if scalar else out


def expected_exit_time_dx(nu: float, x: ArrayLike) -> ArrayLike:
    """Spatial derivative of expected_exit_time."""
    nu = float(nu)
    arr, scalar = _as_array(x)
    _check_unit_interval(arr)
    if abs(nu) < _SMALL_NU:
        out = (1.0 - 2.0 * arr) + (nu / 3.0) * (1.0 - 6.0 * arr + 6.0 * arr * arr) \
            - (2.0 * nu * nu / 3.0) * arr * (1.0 - arr) * (1.0 - 2.0 * arr)
    elif nu > 0.0:
        out = -1.0 / nu - 2.0 * np.exp(-2.0 * nu * arr) / np.expm1(-2.0 * nu)
    else:
        neg = expected_exit_time_dx(-nu, 1.0 - arr)
        out = -neg
    return float(out) if scalar else out


def expected_exit_time_dxx(nu: float, x: ArrayLike) -> ArrayLike:
    """Second spatial derivative of expected_exit_time."""
    nu = float(nu)
    arr, scalar = _as_array(x)
    _check_unit_interval(arr)
    if abs(nu) < _SMALL_NU:
        out = -2.0 + 2.0 * nu * (2.0 * arr - 1.0) \
            - (2.0 * nu * nu / 3.0) * (1.0 - 6.0 * arr + 6.0 * arr * arr)
    elif nu > 0.0:
        out = 4.0 * nu * np.exp(-2.0 * nu * arr) / np.expm1(-2.0 * nu)
    else:
        out = expected_exit_time_dxx(-nu, 1.0 - arr)
    return float(out) if scalar else out


def _sinhc_minus_1(mu: float) -> float:
    """sinh(mu)/mu - 1, accurate for small mu."""
    if mu < 0.5:
        m2 = mu * mu
        return (m2 / 6.0) * (1.0 + (m2 / 20.0) * (1.0 + (m2 / 42.0) * (1.0 + m2 / 72.0)))
    return math.sinh(mu) / mu - 1.0


def _log_sinhc_and_r(mu: float) -> tuple[float, float]:
    """log(sinh(mu)/mu) and r = sqrt(1 - (mu/sinh(mu))^2)."""
    if mu > _LARGE_ARG:
        # sinh(mu) = e^mu (1 - e^{-2 mu}) / 2; q^2 underflows, r = 1
        log_w = mu - math.log(2.0 * mu) + math.log1p(-math.exp(-2.0 * mu))
        return log_w, 1.0
    wm1 = _sinhc_minus_1(mu)
    w = 1.0 + wm1
    one_minus_q2 = wm1 * (w + 1.0) / (w * w)
    return math.log1p(wm1), math.sqrt(one_minus_q2)


def critical_cost(mu: float) -> float:
    """Switching cost above which flipping the drift is never worthwhile.

    Positive, tending to 0 in both limits mu -> 0 and mu -> infinity.
    """
    mu = _require_positive("mu", mu)
    log_w, r = _log_sinhc_and_r(mu)
    return (log_w + math.log1p(r) - r) / (mu * mu)


def critical_threshold(mu: float) -> float:
    """Position in ]0, 1/2[ where the two constant-drift exit times differ by
    exactly the critical cost; the switching region collapses to it at c = c*."""
    mu = _require_positive("mu", mu)
    log_w, r = _log_sinhc_and_r(mu)
    return (mu - log_w - math.log1p(r)) / (2.0 * mu)


def zero_cost_value(mu: float, x: ArrayLike) -> ArrayLike:
    """Limit of the expulsion value as the switching cost vanishes.

    Equals m/mu - e^{-mu} (e^{2 mu m} - 1) / (2 mu^2) with m = min(x, 1-x):
    the particle is pushed straight at the nearer boundary.
    """
    mu = _require_positive("mu", mu)
    arr, scalar = _as_array(x)
    _check_unit_interval(arr)
    m = 0.5 - np.abs(0.5 - arr)
    if mu > _LARGE_ARG:
        out = m / mu - (np.exp(mu * (2.0 * m - 1.0)) - math.exp(-mu)) / (2.0 * mu * mu)
    else:
        out = m / mu - math.exp(-mu) * np.expm1(2.0 * mu * m) / (2.0 * mu * mu)
    return float(out) if scalar else out


def hit_prob(nu: float, x: float, lo: float, hi: float) -> float:
    """Probability that Brownian motion with drift nu started at x hits lo before hi.

    Requires lo < x < hi.  Monotone decreasing in x and in nu.
    """
    nu, x, lo, hi = float(nu), float(x), float(lo), float(hi)
    if not all(map(math.isfinite, (nu, x, lo, hi))) or lo >= hi:
        raise OutOfDomain(f"need finite lo < hi, got [{lo}, {hi}]")
    if x <= lo or x >= hi:
        raise OutOfDomain(f"x must lie strictly inside ]{lo}, {hi}[, got {x}")
    if nu == 0.0:
        return (hi - x) / (hi - lo)
    u = 2.0 * nu * (hi - x)
    v = 2.0 * nu * (hi - lo)
    if v > 700.0:
        # rescale so only negative exponents appear
        return math.exp(u - v) * (-math.expm1(-u)) / (-math.expm1(-v))
    return math.expm1(u) / math.expm1(v)
