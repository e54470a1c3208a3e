import numpy as np
import pytest
from hypothesis import given, strategies as st

from driftswitch.fbp import solve_max, solve_min
from driftswitch.model import DriftSign, ProblemParams, State
from driftswitch.policy import (
    constant_policy,
    decide,
    optimal_max_policy,
    optimal_min_policy,
    perturbed_min_policy,
    threshold_policy,
)

UP, DOWN = DriftSign.UP, DriftSign.DOWN
P001 = ProblemParams(1.0, 0.01)
MIN_POLICY = optimal_min_policy(solve_min(P001))
MAX_POLICY = optimal_max_policy(solve_max(P001))


@pytest.mark.parametrize("x,expected", [
    (0.5, UP),    # above b: continue
    (0.2, DOWN),  # inside [a, b]: flip
    (0.05, UP),   # below a: continue
])
def test_min_policy_decisions(x, expected):
    assert decide(MIN_POLICY, State(x, UP)) is expected


@pytest.mark.parametrize("x,expected", [
    (0.7, DOWN),  # inside [a_max, b_max]: flip
    (0.95, UP),   # above b_max: continue
    (0.3, UP),    # below a_max: continue
])
def test_max_policy_decisions(x, expected):
    assert decide(MAX_POLICY, State(x, UP)) is expected


def test_thresholds_belong_to_switching_region():
    s = solve_min(P001)
    assert decide(MIN_POLICY, State(s.a, UP)) is DOWN
    assert decide(MIN_POLICY, State(s.b, UP)) is DOWN


def test_down_interval_is_mirror():
    pol = threshold_policy((0.1, 0.3))
    assert pol.switch_up == (0.1, 0.3)
    assert pol.switch_down == (0.7, 0.9)
    assert decide(pol, State(0.8, DOWN)) is UP
    assert decide(pol, State(0.8, UP)) is UP


def test_flip_is_not_immediately_undone():
    # the two switching intervals are disjoint for c below critical
    for x in np.linspace(0.0, 1.0, 201):
        a = decide(MIN_POLICY, State(float(x), UP))
        if a is DOWN:
            assert decide(MIN_POLICY, State(float(x), DOWN)) is DOWN


@given(x=st.floats(0.0, 1.0), a=st.sampled_from([UP, DOWN]),
       pol=st.sampled_from([MIN_POLICY, MAX_POLICY]))
def test_mirror_symmetry_of_actions(x, a, pol):
    mirrored = 1.0 - x
    assert int(decide(pol, State(x, a))) == -int(decide(pol, State(mirrored, a.flipped)))


def test_degenerate_policy_flips_only_at_the_point():
    s = solve_min(ProblemParams(1.0, 0.5))
    pol = optimal_min_policy(s)
    assert decide(pol, State(s.a, UP)) is DOWN
    assert decide(pol, State(s.a + 1e-9, UP)) is UP
    assert decide(pol, State(s.a - 1e-9, UP)) is UP


def test_constant_policy_never_flips():
    pol = constant_policy(UP)
    for x in (0.0, 0.2082, 0.5, 1.0):
        assert decide(pol, State(x, UP)) is UP
        assert decide(pol, State(x, DOWN)) is DOWN


def test_perturbed_policy_shifts_and_clamps():
    s = solve_min(P001)
    pol = perturbed_min_policy(s, 0.1)
    assert pol.switch_up == pytest.approx((s.a + 0.1, s.b + 0.1))
    pol = perturbed_min_policy(s, 0.3)
    assert pol.switch_up[1] == 0.5  # clamped at the midpoint
    pol = perturbed_min_policy(s, -1.0)
    assert pol.switch_up == (0.0, 0.0)


def test_policy_kinds():
    assert MIN_POLICY.kind == "optimal-min"
    assert MAX_POLICY.kind == "optimal-max"
    assert constant_policy(UP).kind == "constant"
    assert perturbed_min_policy(solve_min(P001), 0.05).kind == "perturbed-threshold"
