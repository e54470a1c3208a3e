"""Decision rules mapping particle state to the drift to apply.

Threshold rules flip the drift on entry into a switching interval; the
interval for drift -1 is always the mirror image (x -> 1-x) of the one for
drift +1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .fbp import MaxSolution, MinSolution
from .model import DriftSign, State

Interval = tuple[float, float]


@dataclass(frozen=True)
class Policy:
    """Stateless decision rule.

    switch_up / switch_down are the closed intervals on which a flip is
    prescribed when the current drift is +1 / -1; None means never flip.
    """

    kind: str
    description: str
    switch_up: Optional[Interval]
    switch_down: Optional[Interval]


def threshold_policy(switch_up: Interval, kind: str = "threshold",
                     description: str = "") -> Policy:
    """Threshold rule from the drift +1 switching interval; drift -1 mirrored."""
    lo, hi = float(switch_up[0]), float(switch_up[1])
    return Policy(
        kind=kind,
        description=description or f"threshold flip on [{lo:.6g}, {hi:.6g}]",
        switch_up=(lo, hi),
        switch_down=(1.0 - hi, 1.0 - lo),
    )


def optimal_min_policy(sol: MinSolution) -> Policy:
    """Expulsion-optimal rule: flip on first entry into the solved interval."""
    return threshold_policy(
        (sol.a, sol.b), kind="optimal-min",
        description=f"expulsion threshold rule, flip on [{sol.a:.6g}, {sol.b:.6g}]",
    )


def optimal_max_policy(sol: MaxSolution) -> Policy:
    """Confinement-optimal rule: flip on first entry into the solved interval."""
    return threshold_policy(
        (sol.a, sol.b), kind="optimal-max",
        description=f"confinement threshold rule, flip on [{sol.a:.6g}, {sol.b:.6g}]",
    )


def perturbed_min_policy(sol: MinSolution, shift: float) -> Policy:
    """Expulsion rule with both thresholds shifted; for suboptimality studies.

    The shifted interval is clamped to [0, 1/2] so the mirrored intervals
    stay disjoint except possibly at the midpoint.
    """
    shift = float(shift)
    lo = min(max(sol.a + shift, 0.0), 0.5)
    hi = min(max(sol.b + shift, 0.0), 0.5)
    return threshold_policy(
        (lo, hi), kind="perturbed-threshold",
        description=f"expulsion rule shifted by {shift:+.6g}, flip on [{lo:.6g}, {hi:.6g}]",
    )


def constant_policy(a: DriftSign) -> Policy:
    """Hold drift `a` forever; never flips regardless of state."""
    a = DriftSign(a)
    return Policy(
        kind="constant",
        description=f"constant drift {int(a):+d}",
        switch_up=None,
        switch_down=None,
    )


def decide(policy: Policy, state: State) -> DriftSign:
    """Drift to apply at `state`: flipped inside the switching interval of the
    current drift, unchanged outside."""
    interval = policy.switch_up if state.drift == DriftSign.UP else policy.switch_down
    if interval is not None and interval[0] <= state.x <= interval[1]:
        return state.drift.flipped
    return state.drift
