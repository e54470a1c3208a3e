"""Self-checks for solved instances.

Each check evaluates a family of identities or inequalities that the exact
solution satisfies, reports the worst violation found on a grid, and
compares it against a fixed threshold.  All checks are pure functions of
their inputs.

Grid points stay 1e-9 away from piece boundaries so one-sided quantities
are well defined (the second derivative of the value jumps there).  Strict
inequalities are asserted with a margin of 1e-12 instead of > 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closedform import zero_cost_value
from .fbp import (MaxSolution, MinSolution, _pieces_max, _pieces_min, eq_a,
                  eq_b, eq_b_max, regions, solve_max, solve_min, value_max,
                  value_min, dvalue_dx, d2value_dx2)
from .model import DriftSign, ProblemParams

_BOUNDARY_OFFSET = 1e-9
_STRICT_MARGIN = 1e-12


@dataclass(frozen=True)
class CheckResult:
    """One named check: passed iff max_violation <= threshold."""

    name: str
    max_violation: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class DiagnosticsReport:
    instance: ProblemParams
    checks: list[CheckResult]
    grid_size: int

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _entry(name: str, max_violation: float, threshold: float) -> CheckResult:
    max_violation = float(max_violation)
    return CheckResult(name, max_violation, threshold, max_violation <= threshold)


def _piece_grid(lo: float, hi: float, n: int) -> np.ndarray:
    # extended precision: the identities under test are exact in real
    # arithmetic, and the confinement value grows like e^mu, so float64
    # evaluation noise alone would swamp the absolute thresholds at large mu
    lo, hi = lo + _BOUNDARY_OFFSET, hi - _BOUNDARY_OFFSET
    if hi <= lo:
        return np.empty(0, dtype=np.longdouble)
    return np.linspace(lo, hi, max(n, 10), dtype=np.longdouble)


def _region_grids(sol, drift: DriftSign, grid_size: int):
    """(continuation grid, switching grid) for one drift sign."""
    reg = regions(sol, drift)
    pieces = list(reg.continuation)
    total = sum(hi - lo for lo, hi in pieces)
    cont = [
        _piece_grid(lo, hi, round(grid_size * (hi - lo) / total))
        for lo, hi in pieces
    ]
    lo, hi = reg.switching
    switch = _piece_grid(lo, hi, max(grid_size // 4, 10))
    return np.concatenate(cont), switch


def check_root_residuals(sol_min: MinSolution, sol_max: MaxSolution) -> list[CheckResult]:
    """The solver's roots plugged back into their defining equations."""
    mu, c = sol_min.mu_eff, sol_min.cost_eff
    thr = 1e-10
    if sol_min.degenerate:
        # no root was solved for; the thresholds are the critical ones
        return []
    return [
        _entry("root-residual-min-t", abs(eq_b(sol_min.t_root, mu, c)), thr),
        _entry("root-residual-min-s",
               abs(eq_a(sol_min.s_root, sol_min.alpha, mu, c)), thr),
        _entry("root-residual-max-s",
               abs(eq_b_max(sol_max.s_root, sol_max.gamma, mu, c)), thr),
    ]


def check_ordering(sol_min: MinSolution, sol_max: MaxSolution) -> list[CheckResult]:
    """0 < a <= b < 1/2 < a_max <= b_max < 1, and b_max > 1 - a."""
    deficits = [
        0.0 - sol_min.a,
        sol_min.a - sol_min.b,
        sol_min.b - 0.5,
        0.5 - sol_max.a,
        sol_max.a - sol_max.b,
        sol_max.b - 1.0,
        (1.0 - sol_min.a) - sol_max.b,
    ]
    if sol_min.degenerate:
        # a = b is the only admissible configuration then
        deficits[1] = abs(sol_min.a - sol_min.b) - _STRICT_MARGIN
        deficits[4] = abs(sol_max.a - sol_max.b) - _STRICT_MARGIN
        deficits[6] = abs((1.0 - sol_min.a) - sol_max.b) - _STRICT_MARGIN
    return [_entry("ordering-chain", max(deficits), 0.0)]


def check_smooth_fit(sol_min: MinSolution, sol_max: MaxSolution) -> list[CheckResult]:
    """One-sided derivative and value gaps at the four free boundaries.

    Boundaries are reconstructed from the solved roots in extended precision:
    the stored float64 thresholds sit half an ulp off the true boundary,
    which the confinement problem's second derivative (growing like e^mu)
    would amplify past the thresholds.  Only drift +1 boundaries are
    checked: the drift -1 ones evaluate through the identical mirrored
    expressions by construction.
    """
    ld = np.longdouble
    two_mu = 2.0 * ld(sol_min.mu_eff)
    a_min = ld(sol_min.s_root) / two_mu
    b_min = (ld(sol_min.t_root) + ld(sol_min.mu_eff)) / two_mu
    a_max = 1.0 - b_min
    b_max = 1.0 - ld(sol_max.s_root) / two_mu
    out = []
    for tag, sol, pieces, a, b in (
            ("min", sol_min, _pieces_min, a_min, b_min),
            ("max", sol_max, _pieces_max, a_max, b_max)):
        if sol.degenerate:
            continue
        (v0, v1, v2), (d0, d1, d2), _ = pieces(sol)
        scale = sol.value_scale
        dgap = scale * max(abs(float(d0(a) - d1(a))), abs(float(d1(b) - d2(b))))
        vgap = scale * max(abs(float(v0(a) - v1(a))), abs(float(v1(b) - v2(b))))
        out.append(_entry(f"smooth-fit-{tag}", dgap, 1e-9))
        out.append(_entry(f"value-fit-{tag}", vgap, 1e-12))
    return out


def _ode_residual(sol, x: np.ndarray, drift: DriftSign) -> np.ndarray:
    p = sol.params
    d1 = dvalue_dx(sol, x, drift)
    d2 = d2value_dx2(sol, x, drift)
    return 1.0 + int(drift) * p.mu * d1 + 0.5 * p.sigma ** 2 * d2


def check_ode_residual(sol_min: MinSolution, sol_max: MaxSolution,
                       grid_size: int) -> list[CheckResult]:
    """Generator identity 1 + a mu V' + (sigma^2/2) V'' = 0 on continuation
    regions; strict sign of the same expression inside switching regions
    (positive for the min problem, negative for the max problem)."""
    if grid_size < 10:
        raise ValueError(f"grid_size must be at least 10, got {grid_size!r}")
    out = []
    for tag, sol, want in (("min", sol_min, +1.0), ("max", sol_max, -1.0)):
        if sol.degenerate:
            x = _piece_grid(0.0, 1.0, grid_size)
            worst = max(
                np.max(np.abs(_ode_residual(sol, x, DriftSign.UP))),
                np.max(np.abs(_ode_residual(sol, x, DriftSign.DOWN))),
            )
            out.append(_entry(f"ode-residual-{tag}", worst, 1e-8))
            continue
        worst = 0.0
        margin_deficit = -np.inf
        for drift in (DriftSign.UP, DriftSign.DOWN):
            cont, switch = _region_grids(sol, drift, grid_size)
            worst = max(worst, np.max(np.abs(_ode_residual(sol, cont, drift))))
            signed = want * _ode_residual(sol, switch, drift)
            margin_deficit = max(margin_deficit, _STRICT_MARGIN - np.min(signed))
        out.append(_entry(f"ode-residual-{tag}", worst, 1e-8))
        out.append(_entry(f"ode-sign-{tag}", margin_deficit, 0.0))
    return out


def check_switch_inequality(sol_min: MinSolution, sol_max: MaxSolution,
                            grid_size: int) -> list[CheckResult]:
    """Flipping never gains on continuation regions and is exactly neutral
    on switching regions.

    Min problem: V(x,a) <= c + V(x,-a), equality on the switching region.
    Max problem: V(x,a) >= V(x,-a) - c, equality on the switching region.
    The gap vanishes quadratically at the free boundaries, so on the full
    continuation grid only non-negativity up to noise is asserted; genuine
    strictness is witnessed at piece midpoints.
    """
    out = []
    for tag, sol, value, sgn in (("min", sol_min, value_min, +1.0),
                                 ("max", sol_max, value_max, -1.0)):
        c = sol.params.cost
        worst_gap = -np.inf
        mid_deficit = -np.inf
        worst_eq = 0.0
        for drift in (DriftSign.UP, DriftSign.DOWN):
            if sol.degenerate:
                x = _piece_grid(0.0, 1.0, grid_size)
                gap = sgn * (c * sgn + value(sol, x, drift.flipped)
                             - value(sol, x, drift))
                worst_gap = max(worst_gap, np.max(-gap))
                continue
            reg = regions(sol, drift)
            cont, switch = _region_grids(sol, drift, grid_size)
            # gap >= 0 with equality only at the free boundaries
            gap = sgn * (c * sgn + value(sol, cont, drift.flipped)
                         - value(sol, cont, drift))
            worst_gap = max(worst_gap, np.max(-gap))
            mids = np.array([(lo + hi) / 2.0 for lo, hi in reg.continuation],
                            dtype=np.longdouble)
            mid_gap = sgn * (c * sgn + value(sol, mids, drift.flipped)
                             - value(sol, mids, drift))
            mid_deficit = max(mid_deficit, _STRICT_MARGIN - np.min(mid_gap))
            eq = value(sol, switch, drift) - value(sol, switch, drift.flipped) - sgn * c
            worst_eq = max(worst_eq, np.max(np.abs(eq)))
        out.append(_entry(f"switch-gain-{tag}", worst_gap, _STRICT_MARGIN))
        if not sol.degenerate:
            out.append(_entry(f"switch-gain-{tag}-interior", mid_deficit, 0.0))
            out.append(_entry(f"switch-equality-{tag}", worst_eq, 1e-12))
    return out


def check_scaling(mu: float, cost: float, sigma: float,
                  grid_size: int) -> list[CheckResult]:
    """Noise reduction: the (mu, c, sigma) values equal 1/sigma^2 times the
    (mu/sigma^2, c sigma^2, 1) values pointwise; thresholds coincide."""
    direct = ProblemParams(mu, cost, sigma)
    reduced = ProblemParams(mu / sigma ** 2, cost * sigma ** 2, 1.0)
    s2 = sigma ** 2
    x = np.linspace(0.0, 1.0, max(grid_size, 10))
    out = []
    dmin, rmin = solve_min(direct), solve_min(reduced)
    dmax, rmax = solve_max(direct), solve_max(reduced)
    for tag, dsol, rsol, value in (("min", dmin, rmin, value_min),
                                   ("max", dmax, rmax, value_max)):
        worst = max(
            np.max(np.abs(value(dsol, x, DriftSign.UP) - value(rsol, x, DriftSign.UP) / s2)),
            np.max(np.abs(value(dsol, x, DriftSign.DOWN) - value(rsol, x, DriftSign.DOWN) / s2)),
        )
        out.append(_entry(f"scaling-{tag}", worst, 1e-10))
    tgap = max(abs(dmin.a - rmin.a), abs(dmin.b - rmin.b),
               abs(dmax.a - rmax.a), abs(dmax.b - rmax.b))
    out.append(_entry("scaling-thresholds", tgap, 1e-12))
    return out


def check_zero_cost_limit(mu: float, c_sequence) -> list[CheckResult]:
    """Vanishing-cost behaviour along a decreasing sequence of costs:
    a_c decreases to 0, b_c increases to 1/2, and the min value converges
    uniformly to the zero-cost value."""
    cs = [float(c) for c in c_sequence]
    if not cs or any(c <= 0.0 for c in cs):
        raise ValueError("c_sequence must be positive")
    if any(c1 <= c2 for c1, c2 in zip(cs, cs[1:])):
        raise ValueError("c_sequence must be strictly decreasing")
    x = np.linspace(0.0, 1.0, 2001)
    limit = zero_cost_value(mu, x)
    a_seq, b_seq, dist = [], [], []
    for c in cs:
        sol = solve_min(ProblemParams(mu, c))
        a_seq.append(sol.a)
        b_seq.append(sol.b)
        dist.append(max(
            np.max(np.abs(value_min(sol, x, DriftSign.UP) - limit)),
            np.max(np.abs(value_min(sol, x, DriftSign.DOWN) - limit)),
        ))
    return [
        _entry("zero-cost-a-monotone",
               max(a2 - a1 for a1, a2 in zip(a_seq, a_seq[1:])), 0.0),
        _entry("zero-cost-b-monotone",
               max(b1 - b2 for b1, b2 in zip(b_seq, b_seq[1:])), 0.0),
        _entry("zero-cost-b-below-half", max(b_seq) - 0.5, 0.0),
        _entry("zero-cost-distance-monotone",
               max(d2 - d1 for d1, d2 in zip(dist, dist[1:])), 0.0),
        _entry("zero-cost-final-a", a_seq[-1], 1e-2),
        _entry("zero-cost-final-b-gap", abs(b_seq[-1] - 0.5), 1e-2),
        _entry("zero-cost-final-distance", dist[-1], 1e-3),
    ]


def run_all(params: ProblemParams, grid_size: int = 1001) -> DiagnosticsReport:
    """Full per-instance report: roots, ordering, smooth fit, generator
    identity, switch inequality, and noise scaling."""
    sol_min = solve_min(params)
    sol_max = solve_max(params)
    checks = []
    checks += check_root_residuals(sol_min, sol_max)
    checks += check_ordering(sol_min, sol_max)
    checks += check_smooth_fit(sol_min, sol_max)
    checks += check_ode_residual(sol_min, sol_max, grid_size)
    checks += check_switch_inequality(sol_min, sol_max, grid_size)
    checks += check_scaling(params.mu, params.cost, params.sigma, grid_size)
    return DiagnosticsReport(instance=params, checks=checks, grid_size=grid_size)


def report_text(report: DiagnosticsReport) -> str:
    """Line-oriented rendering, one check per line."""
    p = report.instance
    lines = [
        f"instance: mu={p.mu:.15g} cost={p.cost:.15g} sigma={p.sigma:.15g} "
        f"grid={report.grid_size}"
    ]
    width = max((len(c.name) for c in report.checks), default=0)
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.name:<{width}}  {c.max_violation: .6e}  "
                     f"<= {c.threshold:.6e}  {status}")
    n_fail = sum(not c.passed for c in report.checks)
    lines.append(f"{len(report.checks)} checks, {n_fail} failed")
    return "\n".join(lines)


def report_csv(report: DiagnosticsReport) -> str:
    """RFC-4180-style CSV rendering with a header row."""
    lines = ["check,max_violation,threshold,pass"]
    for c in report.checks:
        lines.append(f"{c.name},{c.max_violation:.15g},{c.threshold:.15g},"
                     f"{'true' if c.passed else 'false'}")
    return "\n".join(lines) + "\n"
