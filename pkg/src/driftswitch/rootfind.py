"""Bracketed scalar root finding.

Brackets carry the function values at both endpoints so that callers can seed
them analytically when direct evaluation would lose the sign to cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable


class NoSignChange(ValueError):
    """The supplied bracket does not straddle a sign change."""


class MaxIterationsExceeded(RuntimeError):
    """Root refinement failed to converge within the iteration budget."""


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise NoSignChange(f"invalid bracket [{self.lo}, {self.hi}]")
        if self.f_lo == 0.0 or self.f_hi == 0.0:
            return
        if math.copysign(1.0, self.f_lo) == math.copysign(1.0, self.f_hi):
            raise NoSignChange(
                f"f({self.lo}) = {self.f_lo} and f({self.hi}) = {self.f_hi} have the same sign"
            )


def bracket_from(f: Callable[[float], float], lo: float, hi: float) -> Bracket:
    """Evaluate f at the endpoints and build a Bracket."""
    return Bracket(lo, hi, f(lo), f(hi))


def find_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol_x: float = 1e-13,
    max_iter: int = 200,
) -> float:
    """Locate the root of f inside `bracket`.

    Bisection alternated with a secant step (kept only when it lands strictly
    inside the current interval), so the interval at least halves every two
    iterations while simple roots converge superlinearly.  The endpoint values
    stored on the bracket are trusted and never recomputed.  Deterministic.
    """
    lo, hi, f_lo, f_hi = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi

    for it in range(max_iter):
        tol = tol_x + 2.0 * math.ulp(max(abs(lo), abs(hi)))
        if hi - lo <= tol:
            return lo if abs(f_lo) <= abs(f_hi) else hi
        if it % 2 == 0 and f_hi != f_lo:
            s = hi - f_hi * (hi - lo) / (f_hi - f_lo)
            if not (lo < s < hi):
                s = 0.5 * (lo + hi)
        else:
            s = 0.5 * (lo + hi)
        f_s = f(s)
        if f_s == 0.0:
            return s
        if (f_s < 0.0) == (f_lo < 0.0):
            lo, f_lo = s, f_s
        else:
            hi, f_hi = s, f_s
    raise MaxIterationsExceeded(
        f"no convergence after {max_iter} iterations; last interval width {hi - lo:.3e}"
    )
