"""Problem data for drift-switching control on the unit interval.

A particle diffuses on [0, 1] with controllable drift sign: dX = A*mu dt + sigma dB,
A in {-1, +1}.  Each sign flip costs `cost` (in time units).  The expulsion problem
minimises E[tau + cost * N], the confinement problem maximises E[tau - cost * N],
where tau is the exit time from ]0, 1[ and N the number of flips.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum


class NonPositiveParameter(ValueError):
    """A model parameter that must be positive and finite is not."""


class OutOfDomain(ValueError):
    """A spatial argument lies outside its admissible interval."""


class DriftSign(IntEnum):
    UP = 1
    DOWN = -1

    @property
    def flipped(self) -> "DriftSign":
        return DriftSign(-self.value)


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise NonPositiveParameter(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ProblemParams:
    """Immutable problem instance: drift magnitude, switching cost, noise scale."""

    mu: float
    cost: float
    sigma: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", _require_positive("mu", self.mu))
        object.__setattr__(self, "cost", _require_positive("cost", self.cost))
        object.__setattr__(self, "sigma", _require_positive("sigma", self.sigma))


def validate_params(mu: float, cost: float, sigma: float = 1.0) -> ProblemParams:
    """Build a ProblemParams, raising NonPositiveParameter on bad input."""
    return ProblemParams(mu=mu, cost=cost, sigma=sigma)


@dataclass(frozen=True)
class State:
    """Particle position in [0, 1] together with the currently applied drift sign."""

    x: float
    drift: DriftSign

    def __post_init__(self) -> None:
        x = float(self.x)
        if not math.isfinite(x) or x < 0.0 or x > 1.0:
            raise OutOfDomain(f"x must lie in [0, 1], got {x!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "drift", DriftSign(self.drift))
