"""Request and response bodies for the HTTP facade.

Field constraints mirror the library's own domain checks so malformed
requests are rejected at the edge as 422s instead of surfacing as
exceptions from the numerics. Bounds on grid sizes and path counts exist
only here; the library itself does not cap them.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


class Instance(BaseModel):
    """One problem instance; sigma defaults to the normalized noise level."""

    mu: float = Field(gt=0)
    cost: float = Field(gt=0)
    sigma: float = Field(default=1.0, gt=0)


class SolveResponse(BaseModel):
    """Thresholds and closed-form coefficients for both problems."""

    mu: float
    cost: float
    sigma: float
    a: float
    b: float
    a_max: float
    b_max: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    critical_cost: float
    degenerate: bool


class CriticalCostResponse(BaseModel):
    mu: float
    sigma: float
    critical_cost: float


class ValueRequest(BaseModel):
    instance: Instance
    x: float = Field(ge=0, le=1)
    drift: Literal[1, -1] = 1
    problem: Literal["min", "max"] = "min"


class ValueResponse(BaseModel):
    value: float


class CurveRequest(BaseModel):
    instance: Instance
    grid: int = Field(default=1001, ge=2, le=1_000_001)


class CurveResponse(BaseModel):
    """Value-function table as parallel columns over a uniform x grid."""

    x: list[float]
    v_min_up: list[float]
    v_min_down: list[float]
    v_max_up: list[float]
    v_max_down: list[float]
    f_plus: list[float]
    f_minus: list[float]


class SimulateRequest(BaseModel):
    instance: Instance
    policy: Literal["optimal-min", "optimal-max", "constant", "perturbed"]
    shift: Optional[float] = None
    x0: float = Field(ge=0, le=1)
    drift: Literal[1, -1] = 1
    paths: int = Field(default=100_000, ge=1, le=10_000_000)
    dt: float = Field(default=1e-4, gt=0)
    seed: int = Field(default=0, ge=0)
    max_time: float = Field(default=1e4, gt=0)
    bridge: bool = True

    @model_validator(mode="after")
    def _shift_needs_perturbed(self) -> "SimulateRequest":
        if self.policy == "perturbed" and self.shift is None:
            raise ValueError("shift is required when policy is 'perturbed'")
        return self


class SimulateResponse(BaseModel):
    policy: str
    problem: Literal["min", "max"]
    mean_cost: float
    std_error: float
    mean_tau: float
    mean_switches: float
    n_paths: int
    n_truncated: int


class CheckRequest(BaseModel):
    instance: Instance
    grid: int = Field(default=1001, ge=10, le=1_000_001)


class CheckEntry(BaseModel):
    name: str
    max_violation: float
    threshold: float
    passed: bool


class CheckResponse(BaseModel):
    instance: Instance
    grid_size: int
    all_passed: bool
    checks: list[CheckEntry]
