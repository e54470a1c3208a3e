"""Free-boundary solver for the expulsion (min) and confinement (max) problems.

With unit noise, the optimal policies are threshold rules: flip the drift on
first entry into a switching interval.  Smooth fit reduces each problem to one
or two scalar transcendental equations whose brackets have analytically known
endpoint signs; everything else is closed-form.

Internally everything is solved in the unit-noise normalisation.  An instance
with noise scale sigma is reduced to (mu/sigma^2, cost*sigma^2, 1): switching
thresholds are unchanged, values pick up a factor 1/sigma^2.

Value pieces for the min problem, drift +1, switching interval [a, b]:

    [0, a[ :  -x/mu + beta (e^{-2 mu x} - 1)
    [a, b] :   x/mu + alpha (e^{2 mu x} - 1) + cost
    ]b, 1] :  (1-x)/mu + alpha (e^{2 mu (1-x)} - 1)

and value(x, -1) = value(1-x, +1).  The max problem has the analogous shape
with coefficients gamma, delta and switching interval in ]1/2, 1[.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .closedform import (
    _as_array,
    _check_unit_interval,
    critical_cost,
    critical_threshold,
    expected_exit_time,
    expected_exit_time_dx,
    expected_exit_time_dxx,
)
from .model import DriftSign, ProblemParams
from .rootfind import Bracket, find_root

# costs within this band below the critical cost are treated as critical
_DEGENERATE_BAND = 1e-12


@dataclass(frozen=True)
class MinSolution:
    """Thresholds and ODE coefficients of the expulsion problem."""

    params: ProblemParams
    a: float           # lower switching threshold for drift +1
    b: float           # upper switching threshold for drift +1
    alpha: float       # coefficient on [a, 1] pieces; always negative
    beta: float        # coefficient on [0, a[; always negative
    t_root: float      # root giving b: t = mu (2 b - 1)
    s_root: float      # root giving a: s = 2 mu a
    s_peak: float      # log-scale peak of the lower-threshold equation; s_root < s_peak
    degenerate: bool   # cost >= critical cost: a == b, switching never pays

    @property
    def mu_eff(self) -> float:
        return self.params.mu / self.params.sigma**2

    @property
    def cost_eff(self) -> float:
        return self.params.cost * self.params.sigma**2

    @property
    def value_scale(self) -> float:
        return 1.0 / self.params.sigma**2


@dataclass(frozen=True)
class MaxSolution:
    """Thresholds and ODE coefficients of the confinement problem."""

    params: ProblemParams
    a: float           # lower switching threshold for drift +1; equals 1 - MinSolution.b
    b: float           # upper switching threshold for drift +1
    gamma: float       # coefficient on [0, b] pieces; always negative
    delta: float       # coefficient on ]b, 1]; either sign can occur
    s_root: float      # root giving b: s = 2 mu (1 - b)
    degenerate: bool

    @property
    def mu_eff(self) -> float:
        return self.params.mu / self.params.sigma**2

    @property
    def cost_eff(self) -> float:
        return self.params.cost * self.params.sigma**2

    @property
    def value_scale(self) -> float:
        return 1.0 / self.params.sigma**2


Solution = Union[MinSolution, MaxSolution]


@dataclass(frozen=True)
class Region:
    """Switching interval (closed) and its complement for one drift sign."""

    drift: DriftSign
    switching: tuple[float, float]
    continuation: tuple[tuple[float, float], tuple[float, float]]


def eq_b(t: float, mu: float, cost: float) -> float:
    """Upper-threshold equation of the min problem, in t = mu (2 b - 1).

    Equivalent grouping of e^{2t} (t + c mu^2 - 1) + t + c mu^2 + 1 that keeps
    the near-zero values of both the function and its endpoint limits exact.
    """
    cmu2 = cost * mu * mu
    return (t + cmu2) * (math.exp(2.0 * t) + 1.0) - math.expm1(2.0 * t)


def _eq_b_prime(t: float, mu: float, cost: float) -> float:
    cmu2 = cost * mu * mu
    e2t = math.exp(2.0 * t)
    return (e2t + 1.0) + 2.0 * e2t * (t + cmu2 - 1.0)


def eq_a(s: float, alpha: float, mu: float, cost: float) -> float:
    """Lower-threshold equation of the min problem, in s = 2 mu a.

    Grouped as mu^2 alpha E^2 + E - s - c mu^2 with E = e^s - 1, which avoids
    the cancellation of the naive expansion near s = 0.
    """
    e = math.expm1(s)
    return mu * mu * alpha * e * e + e - s - cost * mu * mu


def _eq_a_prime(s: float, alpha: float, mu: float, cost: float) -> float:
    e = math.expm1(s)
    return 2.0 * mu * mu * alpha * e * (1.0 + e) + e


def eq_b_max(s: float, gamma: float, mu: float, cost: float) -> float:
    """Upper-threshold equation of the max problem, in s = 2 mu (1 - b).

    Grouped as mu^2 gamma F^2 + F + s + c mu^2 with F = e^{-s} - 1; gamma can
    be exponentially large in mu, so the squared-difference form is required
    to keep the residual meaningful.
    """
    f = math.expm1(-s)
    return mu * mu * gamma * f * f + f + s + cost * mu * mu


def _eq_b_max_prime(s: float, gamma: float, mu: float, cost: float) -> float:
    f = math.expm1(-s)
    return -2.0 * mu * mu * gamma * f * (1.0 + f) - f


def _log_cosh(t: float) -> float:
    a = abs(t)
    return a + math.log1p(math.exp(-2.0 * a)) - math.log(2.0)


def _polish(f, fprime, x: float, lo: float, hi: float, steps: int = 2) -> float:
    # Newton refinement; never leaves the bracketing interval
    for _ in range(steps):
        d = fprime(x)
        if d == 0.0 or not math.isfinite(d):
            break
        x_new = x - f(x) / d
        if not (lo <= x_new <= hi):
            break
        x = x_new
    return x


def _reduced(params: ProblemParams) -> tuple[float, float]:
    s2 = params.sigma * params.sigma
    return params.mu / s2, params.cost * s2


def instance_critical_cost(params: ProblemParams) -> float:
    """Critical switching cost of the instance, in its own units."""
    mu_eff, _ = _reduced(params)
    return critical_cost(mu_eff) / params.sigma**2


def solve_min(params: ProblemParams) -> MinSolution:
    """Solve the expulsion free-boundary problem for one instance."""
    mu, cost = _reduced(params)
    c_star = critical_cost(mu)
    if cost > c_star - _DEGENERATE_BAND:
        x_star = critical_threshold(mu)
        t = mu * (2.0 * x_star - 1.0)
        alpha = math.exp(-2.0 * mu) / (mu * math.expm1(-2.0 * mu))
        beta = 1.0 / (mu * math.expm1(-2.0 * mu))
        return MinSolution(
            params=params, a=x_star, b=x_star, alpha=alpha, beta=beta,
            t_root=t, s_root=t + mu, s_peak=mu + _log_cosh(t), degenerate=True,
        )

    cmu2 = cost * mu * mu
    # t_c lies in ]-c mu^2 - 1, -c mu^2[; endpoint values are analytic
    br_t = Bracket(
        lo=-cmu2 - 1.0, hi=-cmu2,
        f_lo=-2.0 * math.exp(-2.0 * (cmu2 + 1.0)), f_hi=-math.expm1(-2.0 * cmu2),
    )
    t = find_root(lambda u: eq_b(u, mu, cost), br_t, tol_x=1e-15)
    t = _polish(lambda u: eq_b(u, mu, cost), lambda u: _eq_b_prime(u, mu, cost),
                t, br_t.lo, br_t.hi)

    alpha = -math.exp(-mu) / (2.0 * mu * mu * math.cosh(t))
    # s_c lies in ]0, t + mu[; the upper endpoint value vanishes only at c = c*
    k_hi = -mu + math.sinh(mu) / math.cosh(t)
    br_s = Bracket(lo=0.0, hi=t + mu, f_lo=-cmu2, f_hi=k_hi)
    s = find_root(lambda u: eq_a(u, alpha, mu, cost), br_s, tol_x=1e-15)
    s = _polish(lambda u: eq_a(u, alpha, mu, cost),
                lambda u: _eq_a_prime(u, alpha, mu, cost), s, br_s.lo, br_s.hi)

    beta = -alpha * math.exp(2.0 * s) - math.exp(s) / (mu * mu)
    return MinSolution(
        params=params,
        a=s / (2.0 * mu), b=(t + mu) / (2.0 * mu),
        alpha=alpha, beta=beta,
        t_root=t, s_root=s, s_peak=mu + _log_cosh(t), degenerate=False,
    )


def solve_max(params: ProblemParams) -> MaxSolution:
    """Solve the confinement free-boundary problem for one instance."""
    base = solve_min(params)
    mu, cost = _reduced(params)
    if base.degenerate:
        return MaxSolution(
            params=params, a=1.0 - base.a, b=1.0 - base.a,
            gamma=base.beta, delta=base.alpha,
            s_root=base.s_root, degenerate=True,
        )

    t = base.t_root
    # gamma grows like e^mu / (2 mu^2); compute it and delta through extended
    # precision so the rounded coefficients satisfy the smooth-fit identities
    # to within their own representation error
    ld = np.longdouble
    gamma = float(-np.exp(ld(mu)) / (2.0 * ld(mu) * ld(mu) * np.cosh(ld(t))))
    cmu2 = cost * mu * mu
    # root in ]0, 2 mu b[ = ]0, t + mu[, decreasing from c mu^2 to -(upper min endpoint)
    br = Bracket(lo=0.0, hi=t + mu, f_lo=cmu2, f_hi=mu - math.sinh(mu) / math.cosh(t))
    s = find_root(lambda u: eq_b_max(u, gamma, mu, cost), br, tol_x=1e-15)
    s = _polish(lambda u: eq_b_max(u, gamma, mu, cost),
                lambda u: _eq_b_max_prime(u, gamma, mu, cost), s, br.lo, br.hi)

    delta = float(-np.exp(ld(-s)) / (ld(mu) * ld(mu)) - ld(gamma) * np.exp(ld(-2.0 * s)))
    return MaxSolution(
        params=params, a=1.0 - base.b, b=1.0 - s / (2.0 * mu),
        gamma=gamma, delta=delta, s_root=s, degenerate=False,
    )


def _pieces_min(sol: MinSolution):
    mu, cost = sol.mu_eff, sol.cost_eff
    alpha, beta = sol.alpha, sol.beta

    def v0(x):
        return -x / mu + beta * np.expm1(-2.0 * mu * x)

    def v1(x):
        return x / mu + alpha * np.expm1(2.0 * mu * x) + cost

    def v2(x):
        return (1.0 - x) / mu + alpha * np.expm1(2.0 * mu * (1.0 - x))

    # scalar prefactors are grouped so the coefficient multiplies the array
    # first: evaluation then happens entirely in the argument's dtype, which
    # keeps extended-precision inputs extended-precision throughout

    def d0(x):
        return -1.0 / mu - 2.0 * mu * (beta * np.exp(-2.0 * mu * x))

    def d1(x):
        return 1.0 / mu + 2.0 * mu * (alpha * np.exp(2.0 * mu * x))

    def d2(x):
        return -1.0 / mu - 2.0 * mu * (alpha * np.exp(2.0 * mu * (1.0 - x)))

    def s0(x):
        return 2.0 * mu * (2.0 * mu * (beta * np.exp(-2.0 * mu * x)))

    def s1(x):
        return 2.0 * mu * (2.0 * mu * (alpha * np.exp(2.0 * mu * x)))

    def s2(x):
        return 2.0 * mu * (2.0 * mu * (alpha * np.exp(2.0 * mu * (1.0 - x))))

    return (v0, v1, v2), (d0, d1, d2), (s0, s1, s2)


def _pieces_max(sol: MaxSolution):
    mu, cost = sol.mu_eff, sol.cost_eff
    gamma, delta = sol.gamma, sol.delta

    def v0(x):
        return -x / mu + gamma * np.expm1(-2.0 * mu * x)

    def v1(x):
        return -(1.0 - x) / mu + gamma * np.expm1(-2.0 * mu * (1.0 - x)) - cost

    def v2(x):
        return (1.0 - x) / mu + delta * np.expm1(2.0 * mu * (1.0 - x))

    # same scalar grouping rationale as in _pieces_min

    def d0(x):
        return -1.0 / mu - 2.0 * mu * (gamma * np.exp(-2.0 * mu * x))

    def d1(x):
        return 1.0 / mu + 2.0 * mu * (gamma * np.exp(-2.0 * mu * (1.0 - x)))

    def d2(x):
        return -1.0 / mu - 2.0 * mu * (delta * np.exp(2.0 * mu * (1.0 - x)))

    def s0(x):
        return 2.0 * mu * (2.0 * mu * (gamma * np.exp(-2.0 * mu * x)))

    def s1(x):
        return 2.0 * mu * (2.0 * mu * (gamma * np.exp(-2.0 * mu * (1.0 - x))))

    def s2(x):
        return 2.0 * mu * (2.0 * mu * (delta * np.exp(2.0 * mu * (1.0 - x))))

    return (v0, v1, v2), (d0, d1, d2), (s0, s1, s2)


def _piece_masks(x: np.ndarray, a: float, b: float, side: int):
    if side < 0:
        m0 = x <= a
        m1 = (x > a) & (x <= b)
    elif side > 0:
        m0 = x < a
        m1 = (x >= a) & (x < b)
    else:
        # switching interval closed on both ends
        m0 = x < a
        m1 = (x >= a) & (x <= b)
    m2 = ~(m0 | m1)
    return m0, m1, m2


def _eval_pieces(fns, x: np.ndarray, a: float, b: float, side: int) -> np.ndarray:
    out = np.empty_like(x)
    for mask, fn in zip(_piece_masks(x, a, b, side), fns):
        if np.any(mask):
            out[mask] = fn(x[mask])
    return out


def _evaluate(sol: Solution, x, drift, order: int, side: int = 0):
    drift = DriftSign(drift)
    arr, scalar = _as_array(x)
    _check_unit_interval(arr)
    sign = 1.0
    if drift == DriftSign.DOWN:
        arr = 1.0 - arr
        side = -side
        if order == 1:
            sign = -1.0
    if sol.degenerate:
        fns = (expected_exit_time, expected_exit_time_dx, expected_exit_time_dxx)
        out = fns[order](sol.mu_eff, arr)
    else:
        fns = (_pieces_min(sol) if isinstance(sol, MinSolution) else _pieces_max(sol))[order]
        out = _eval_pieces(fns, arr, sol.a, sol.b, side)
    out = out * (sign * sol.value_scale)
    return float(out) if scalar else out


def value_min(sol: MinSolution, x, drift: DriftSign = DriftSign.UP):
    """Optimal expected cost-to-exit E[tau + cost N] from (x, drift)."""
    return _evaluate(sol, x, drift, order=0)


def value_max(sol: MaxSolution, x, drift: DriftSign = DriftSign.UP):
    """Optimal expected reward E[tau - cost N] from (x, drift)."""
    return _evaluate(sol, x, drift, order=0)


def dvalue_dx(sol: Solution, x, drift: DriftSign = DriftSign.UP, side: int = 0):
    """Spatial derivative of the value function.

    `side` selects the piece at threshold points: -1 left limit, +1 right
    limit, 0 the closed-switching-interval convention.
    """
    return _evaluate(sol, x, drift, order=1, side=side)


def d2value_dx2(sol: Solution, x, drift: DriftSign = DriftSign.UP, side: int = 0):
    """Second spatial derivative of the value function (piecewise; see dvalue_dx)."""
    return _evaluate(sol, x, drift, order=2, side=side)


def regions(sol: Solution, drift: DriftSign = DriftSign.UP) -> Region:
    """Switching interval and continuation set for one drift sign."""
    drift = DriftSign(drift)
    if drift == DriftSign.UP:
        lo, hi = sol.a, sol.b
    else:
        lo, hi = 1.0 - sol.b, 1.0 - sol.a
    return Region(drift=drift, switching=(lo, hi), continuation=((0.0, lo), (hi, 1.0)))
