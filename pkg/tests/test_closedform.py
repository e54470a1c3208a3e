"""Closed-form quantities checked against independent derivations.

The frozen constants below are computed from elementary reductions spelled out
next to each one, never from the functions under test.
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from driftswitch.closedform import (
    critical_cost,
    critical_threshold,
    expected_exit_time,
    expected_exit_time_dx,
    hit_prob,
    zero_cost_value,
)
from driftswitch.model import DriftSign, NonPositiveParameter, OutOfDomain, ProblemParams
from driftswitch.mc import SimConfig, _outcomes
from driftswitch.policy import constant_policy

GRID = np.linspace(0.0, 1.0, 2001)


# ---------------------------------------------------------------- exit times

def test_exit_time_boundaries():
    for nu in (-3.0, -1.0, 0.0, 1e-9, 1.0, 20.0):
        assert expected_exit_time(nu, 0.0) == 0.0
        assert expected_exit_time(nu, 1.0) == 0.0


def test_exit_time_unit_drift_midpoint():
    # -x/nu + (1-e^{-2 nu x})/(nu (1-e^{-2 nu})) at nu=1, x=1/2
    # reduces to 1/(1+e^{-1}) - 1/2
    want = 1.0 / (1.0 + math.exp(-1.0)) - 0.5
    assert expected_exit_time(1.0, 0.5) == pytest.approx(want, abs=1e-15)
    assert want == pytest.approx(0.2310586, abs=5e-8)


def test_exit_time_driftless():
    assert expected_exit_time(0.0, 0.5) == pytest.approx(0.25, abs=1e-15)
    assert np.allclose(expected_exit_time(0.0, GRID), GRID * (1.0 - GRID), atol=1e-15)


def test_exit_time_tiny_drift_matches_limit():
    for nu in (1e-8, -1e-8):
        assert np.max(np.abs(expected_exit_time(nu, GRID) - GRID * (1.0 - GRID))) < 1e-6


def test_exit_time_mirror_symmetry():
    for mu in (0.3, 1.0, 5.0, 15.0):
        lhs = expected_exit_time(-mu, GRID)
        rhs = expected_exit_time(mu, 1.0 - GRID)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_exit_time_rejects_outside_interval():
    with pytest.raises(OutOfDomain):
        expected_exit_time(1.0, 1.2)
    with pytest.raises(OutOfDomain):
        expected_exit_time(1.0, np.array([0.2, -0.1]))


def test_exit_time_derivative_matches_finite_difference():
    h = 1e-6
    for nu in (-2.0, 1e-9, 1.0, 8.0):
        x = np.linspace(0.05, 0.95, 19)
        fd = (expected_exit_time(nu, x + h) - expected_exit_time(nu, x - h)) / (2 * h)
        assert np.max(np.abs(expected_exit_time_dx(nu, x) - fd)) < 1e-5


def test_exit_time_against_simulation():
    # MC oracle for f^1(0.5): constant-drift paths, bridge-corrected exits
    cfg = SimConfig(dt=1e-3, n_paths=30_000, seed=3)
    tau, _, _, _ = _outcomes(ProblemParams(1.0, 0.01), constant_policy(DriftSign.UP),
                             0.5, DriftSign.UP, cfg)
    se = float(np.std(tau, ddof=1)) / math.sqrt(tau.size)
    assert abs(float(np.mean(tau)) - expected_exit_time(1.0, 0.5)) < 3 * se + 1e-3


# -------------------------------------------------------------- critical cost

def test_critical_cost_unit_drift():
    assert abs(critical_cost(1.0) - 0.058) < 1e-3


def test_critical_cost_vanishes_at_both_ends():
    assert 0.0 < critical_cost(0.001) < 1e-3
    assert 0.0 < critical_cost(1e-5) < 1e-5
    assert 0.0 < critical_cost(100.0) < 0.01


def test_critical_cost_equals_grid_max_of_gap():
    # independent oracle: brute-force maximum of the exit-time gap
    x = np.linspace(0.0, 1.0, 1_000_000)
    for mu in (0.5, 1.0, 2.0):
        gap = expected_exit_time(mu, x) - expected_exit_time(-mu, x)
        assert abs(critical_cost(mu) - float(np.max(gap))) < 1e-9


def test_critical_cost_rejects_nonpositive():
    with pytest.raises(NonPositiveParameter):
        critical_cost(0.0)
    with pytest.raises(NonPositiveParameter):
        critical_cost(-1.0)


def test_gap_is_below_critical_cost_everywhere():
    for mu in (0.1, 1.0, 5.0):
        gap = expected_exit_time(mu, GRID) - expected_exit_time(-mu, GRID)
        assert np.max(gap) <= critical_cost(mu) + 1e-12


# --------------------------------------------------------- critical threshold

def test_critical_threshold_unit_drift():
    assert abs(critical_threshold(1.0) - 0.2082) < 1e-4


def test_critical_threshold_is_argmax_of_gap():
    x = np.linspace(0.0, 1.0, 2_000_001)
    for mu in (0.3, 1.0, 4.0):
        gap = expected_exit_time(mu, x) - expected_exit_time(-mu, x)
        assert abs(critical_threshold(mu) - x[int(np.argmax(gap))]) < 1e-6


def test_gap_at_critical_threshold_equals_critical_cost():
    for mu in (0.1, 0.7, 1.0, 3.0, 10.0):
        xs = critical_threshold(mu)
        gap = expected_exit_time(mu, xs) - expected_exit_time(-mu, xs)
        assert abs(gap - critical_cost(mu)) < 1e-12


def test_gap_is_stationary_at_critical_threshold():
    h = 1e-6
    for mu in (0.5, 1.0, 2.0):
        xs = critical_threshold(mu)
        d = (expected_exit_time(mu, xs + h) - expected_exit_time(mu, xs - h)
             - expected_exit_time(-mu, xs + h) + expected_exit_time(-mu, xs - h)) / (2 * h)
        assert abs(d) < 1e-6


@given(st.floats(1e-3, 50.0))
def test_critical_threshold_in_lower_half(mu):
    assert 0.0 < critical_threshold(mu) < 0.5


# ------------------------------------------------------------ zero-cost value

def test_zero_cost_value_boundaries_and_midpoint():
    assert zero_cost_value(1.0, 0.0) == 0.0
    assert zero_cost_value(1.0, 1.0) == 0.0
    # 1/2 - (e^{-1}/2)(e - 1) at x = 1/2
    want = 0.5 - 0.5 * math.exp(-1.0) * (math.e - 1.0)
    assert zero_cost_value(1.0, 0.5) == pytest.approx(want, abs=1e-15)
    assert want == pytest.approx(0.18394, abs=5e-6)


def test_zero_cost_value_symmetric():
    for mu in (0.2, 1.0, 6.0):
        v = zero_cost_value(mu, GRID)
        assert np.max(np.abs(v - v[::-1])) < 1e-15


def test_zero_cost_value_formula_lower_half():
    mu, x = 1.3, 0.3
    want = x / mu - math.exp(-mu) / (2 * mu * mu) * (math.exp(2 * mu * x) - 1.0)
    assert zero_cost_value(mu, x) == pytest.approx(want, rel=1e-14)


# ------------------------------------------------------- hitting probabilities

def test_hit_prob_driftless_is_linear():
    assert hit_prob(0.0, 0.25, 0.0, 1.0) == pytest.approx(0.75, abs=1e-15)
    assert hit_prob(0.0, 0.5, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_hit_prob_unit_drift():
    # (e^u - 1)/(e^v - 1) with u = 2(hi-x) = 1, v = 2(hi-lo) = 2: equals 1/(1+e)
    want = 1.0 / (1.0 + math.e)
    assert hit_prob(1.0, 0.5, 0.0, 1.0) == pytest.approx(want, abs=1e-15)
    assert want == pytest.approx(0.2689, abs=5e-5)


def test_hit_prob_translation_invariance():
    a = hit_prob(1.0, 0.5, 0.0, 1.0)
    b = hit_prob(1.0, 0.7, 0.2, 1.2)
    assert a == pytest.approx(b, rel=1e-14)


def test_hit_prob_reflection():
    # flipping the drift is the same as reflecting the interval around x
    for nu, x, lo, hi in [(1.0, 0.5, 0.0, 1.0), (0.7, 0.3, -0.5, 1.5)]:
        lhs = hit_prob(-nu, x, lo, hi)
        assert lhs == pytest.approx(1.0 - hit_prob(nu, -x, -hi, -lo), rel=1e-13)
        assert lhs == pytest.approx(1.0 - hit_prob(nu, lo + hi - x, lo, hi), rel=1e-13)


def test_hit_prob_monotone_in_x_and_nu():
    xs = np.linspace(0.05, 0.95, 46)
    ps = [hit_prob(1.0, float(x), 0.0, 1.0) for x in xs]
    assert all(p1 > p2 for p1, p2 in zip(ps, ps[1:]))
    nus = [-3.0, -1.0, -1e-10, 0.0, 1e-10, 1.0, 3.0]
    ps = [hit_prob(nu, 0.4, 0.0, 1.0) for nu in nus]
    assert all(p1 > p2 for p1, p2 in zip(ps, ps[1:]))


def test_hit_prob_rejects_exterior_start():
    for x in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(OutOfDomain):
            hit_prob(1.0, x, 0.0, 1.0)


@given(nu=st.floats(-8.0, 8.0), x=st.floats(0.01, 0.99))
def test_hit_prob_strictly_interior(nu, x):
    assert 0.0 < hit_prob(nu, x, 0.0, 1.0) < 1.0


def test_hit_prob_extreme_drift_stays_bounded():
    # beyond |nu| ~ 8 the value can round to exactly 0 or 1
    for nu in (-500.0, -40.0, 40.0, 500.0):
        assert 0.0 <= hit_prob(nu, 0.01, 0.0, 1.0) <= 1.0
        assert 0.0 <= hit_prob(nu, 0.99, 0.0, 1.0) <= 1.0


def test_hit_prob_against_simulation():
    # MC oracle: fraction of constant-drift paths exiting through the left side
    cfg = SimConfig(dt=1e-3, n_paths=40_000, seed=5)
    _, _, side, _ = _outcomes(ProblemParams(1.0, 0.01), constant_policy(DriftSign.UP),
                              0.5, DriftSign.UP, cfg)
    p_hat = float(np.mean(side == 0))
    se = math.sqrt(p_hat * (1.0 - p_hat) / side.size)
    assert abs(p_hat - hit_prob(1.0, 0.5, 0.0, 1.0)) < 3 * se + 1e-3
