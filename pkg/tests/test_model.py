import math

import pytest
from hypothesis import given, strategies as st

from driftswitch.model import (
    DriftSign,
    NonPositiveParameter,
    OutOfDomain,
    ProblemParams,
    State,
    validate_params,
)


def test_drift_sign_values():
    assert int(DriftSign.UP) == 1
    assert int(DriftSign.DOWN) == -1
    assert DriftSign.UP.flipped is DriftSign.DOWN
    assert DriftSign.DOWN.flipped is DriftSign.UP
    assert DriftSign(-1) is DriftSign.DOWN


def test_params_defaults_and_fields():
    p = ProblemParams(1.0, 0.04)
    assert p.sigma == 1.0
    assert (p.mu, p.cost) == (1.0, 0.04)
    assert validate_params(1.0, 0.04) == p


def test_params_frozen():
    p = ProblemParams(1.0, 0.04)
    with pytest.raises(AttributeError):
        p.mu = 2.0


@pytest.mark.parametrize("mu,cost,sigma", [
    (0.0, 0.01, 1.0),
    (-1.0, 0.01, 1.0),
    (1.0, 0.0, 1.0),
    (1.0, -0.5, 1.0),
    (1.0, 0.01, 0.0),
    (math.nan, 0.01, 1.0),
    (1.0, math.inf, 1.0),
])
def test_params_reject_nonpositive(mu, cost, sigma):
    with pytest.raises(NonPositiveParameter):
        ProblemParams(mu, cost, sigma)


@given(mu=st.floats(1e-6, 1e3), cost=st.floats(1e-9, 10.0), sigma=st.floats(1e-3, 1e3))
def test_params_accept_positive(mu, cost, sigma):
    p = ProblemParams(mu, cost, sigma)
    assert p.mu > 0 and p.cost > 0 and p.sigma > 0


def test_state_bounds():
    assert State(0.0, DriftSign.UP).x == 0.0
    assert State(1.0, DriftSign.DOWN).x == 1.0
    s = State(0.25, 1)
    assert s.drift is DriftSign.UP  # plain ints are coerced
    for bad in (-0.01, 1.01, math.nan):
        with pytest.raises(OutOfDomain):
            State(bad, DriftSign.UP)
    with pytest.raises(ValueError):
        State(0.5, 0)
