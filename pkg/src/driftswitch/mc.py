"""Monte Carlo simulation of the controlled diffusion on [0, 1].

Paths follow the Euler scheme x_{k+1} = x_k + a_k mu dt + sigma sqrt(dt) Z_k
until they leave ]0, 1[, with an optional Brownian-bridge correction that
catches excursions between grid points.  The decision rule is consulted once
at time 0 and then once per step, after the position update.

All randomness is counter-based: every draw is a pure function of
(seed, path index, step, channel), so any single path can be reproduced
bit-for-bit without replaying the others, and results do not depend on how
paths are batched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .model import DriftSign, NonPositiveParameter, OutOfDomain, ProblemParams, State
from .policy import Policy, decide


class TruncationExcess(RuntimeError):
    """Raised when more than 0.1% of paths hit the simulation time cap."""


# splitmix64 finalizer constants
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# channel ids per step
_CH_NORMAL = 0
_CH_BRIDGE_LO = 1
_CH_BRIDGE_HI = 2

# bridge exponents above this correspond to crossing probabilities < 4e-18
_BRIDGE_CUTOFF = 40.0

_INV_2_53 = 2.0 ** -53


def _fmix64(z: int) -> int:
    # scalar avalanche mix; plain ints so nothing overflows
    z &= _MASK64
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return z


def _u01(seed: int, paths: np.ndarray, step: int, channel: int) -> np.ndarray:
    """Uniforms in ]0, 1[ for the given paths at (step, channel)."""
    key = _fmix64(seed + _GOLDEN * (3 * step + channel + 1))
    z = paths * np.uint64(_MIX1) + np.uint64(key)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX2)
    z ^= z >> np.uint64(31)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings shared by every path of a run."""

    dt: float = 1e-4
    n_paths: int = 100_000
    seed: int = 0
    max_time: float = 1e4
    bridge_correction: bool = True

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise NonPositiveParameter(f"dt must be positive and finite, got {self.dt!r}")
        if self.n_paths < 1:
            raise NonPositiveParameter(f"n_paths must be at least 1, got {self.n_paths!r}")
        if not (self.max_time > 0.0 and math.isfinite(self.max_time)):
            raise NonPositiveParameter(
                f"max_time must be positive and finite, got {self.max_time!r}")
        if not (0 <= self.seed <= _MASK64):
            raise OutOfDomain(f"seed must fit in 64 unsigned bits, got {self.seed!r}")


@dataclass(frozen=True)
class PathOutcome:
    """Result of a single simulated path."""

    tau: float
    n_switches: int
    exit_side: int  # 0 = left boundary, 1 = right; 0 if truncated
    truncated: bool


@dataclass(frozen=True)
class MCEstimate:
    """Sample statistics of a batch of paths."""

    mean_cost: float
    std_error: float
    mean_tau: float
    mean_switches: float
    n_paths: int
    n_truncated: int


def _intervals(policy: Policy) -> tuple[tuple[float, float], tuple[float, float]]:
    # map "never flip" to an empty interval so the kernel stays branch-free
    empty = (2.0, -2.0)
    up = policy.switch_up if policy.switch_up is not None else empty
    down = policy.switch_down if policy.switch_down is not None else empty
    return up, down


def _run_paths(params: ProblemParams, policy: Policy, x0: float, a0: DriftSign,
               config: SimConfig, path_ids: np.ndarray):
    """Simulate the given path ids in lockstep; returns (tau, n_switches,
    exit_side, truncated) arrays aligned with path_ids."""
    x0 = float(x0)
    if not (0.0 <= x0 <= 1.0):
        raise OutOfDomain(f"x0 must lie in [0, 1], got {x0!r}")
    a0 = DriftSign(a0)

    n = path_ids.size
    tau = np.zeros(n)
    n_switches = np.zeros(n, dtype=np.int64)
    exit_side = np.zeros(n, dtype=np.int8)
    truncated = np.zeros(n, dtype=bool)

    # single consultation at time 0; identical across paths
    a_start = decide(policy, State(x0, a0))
    if a_start != a0:
        n_switches[:] = 1
    if x0 <= 0.0 or x0 >= 1.0:
        exit_side[:] = 1 if x0 >= 1.0 else 0
        return tau, n_switches, exit_side, truncated

    up, down = _intervals(policy)
    mu, sigma = params.mu, params.sigma
    dt = config.dt
    sq = sigma * math.sqrt(dt)
    inv_var = 1.0 / (sigma * sigma * dt)
    seed = config.seed
    max_steps = int(math.ceil(config.max_time / dt - 1e-9))

    alive = path_ids.astype(np.uint64)
    pos = np.arange(n)
    x = np.full(n, x0)
    drift = np.full(n, float(int(a_start)))

    for k in range(max_steps):
        z = ndtri(_u01(seed, alive, k, _CH_NORMAL))
        x_new = x + (mu * dt) * drift + sq * z

        out_lo = x_new <= 0.0
        out_hi = x_new >= 1.0
        exit_time = np.full(x.shape, (k + 1) * dt)

        if config.bridge_correction:
            inside = ~(out_lo | out_hi)
            # bridge crossing fires when Exp(1) exceeds w = 2 d0 d1 / (sigma^2 dt)
            w_lo = 2.0 * x * x_new * inv_var
            w_hi = 2.0 * (1.0 - x) * (1.0 - x_new) * inv_var
            cand_lo = inside & (w_lo < _BRIDGE_CUTOFF)
            cand_hi = inside & (w_hi < _BRIDGE_CUTOFF)
            br_lo = np.zeros_like(inside)
            br_hi = np.zeros_like(inside)
            if np.any(cand_lo):
                e = -np.log(_u01(seed, alive[cand_lo], k, _CH_BRIDGE_LO))
                br_lo[cand_lo] = e > w_lo[cand_lo]
            if np.any(cand_hi):
                e = -np.log(_u01(seed, alive[cand_hi], k, _CH_BRIDGE_HI))
                br_hi[cand_hi] = e > w_hi[cand_hi]
            both = br_lo & br_hi
            if np.any(both):
                # ambiguous double crossing: keep the more probable side
                br_hi[both & (w_lo <= w_hi)] = False
                br_lo[both & (w_lo > w_hi)] = False
            out_lo |= br_lo
            out_hi |= br_hi
            exit_time[br_lo | br_hi] = (k + 0.5) * dt

        exited = out_lo | out_hi
        if np.any(exited):
            p = pos[exited]
            tau[p] = exit_time[exited]
            exit_side[p] = out_hi[exited]
            keep = ~exited
            alive = alive[keep]
            pos = pos[keep]
            x = x_new[keep]
            drift = drift[keep]
            if alive.size == 0:
                break
        else:
            x = x_new

        # per-step consultation on the survivors
        in_up = (x >= up[0]) & (x <= up[1])
        in_down = (x >= down[0]) & (x <= down[1])
        flip = np.where(drift > 0.0, in_up, in_down)
        if np.any(flip):
            drift = np.where(flip, -drift, drift)
            n_switches[pos[flip]] += 1

    if alive.size:
        tau[pos] = config.max_time
        truncated[pos] = True
    return tau, n_switches, exit_side, truncated


def simulate_path(params: ProblemParams, policy: Policy, x0: float, a0: DriftSign,
                  config: SimConfig, path_index: int) -> PathOutcome:
    """Simulate one path; bit-identical to the same index inside a batch."""
    if not (0 <= path_index <= _MASK64):
        raise OutOfDomain(f"path_index must fit in 64 unsigned bits, got {path_index!r}")
    ids = np.array([path_index], dtype=np.uint64)
    tau, n_switches, exit_side, truncated = _run_paths(params, policy, x0, a0, config, ids)
    return PathOutcome(
        tau=float(tau[0]),
        n_switches=int(n_switches[0]),
        exit_side=int(exit_side[0]),
        truncated=bool(truncated[0]),
    )


def _outcomes(params: ProblemParams, policy: Policy, x0: float, a0: DriftSign,
              config: SimConfig):
    ids = np.arange(config.n_paths, dtype=np.uint64)
    return _run_paths(params, policy, x0, a0, config, ids)


def estimate_cost(params: ProblemParams, policy: Policy, x0: float, a0: DriftSign,
                  config: SimConfig, problem: str = "min") -> MCEstimate:
    """Estimate E[tau + c N] (problem="min") or E[tau - c N] (problem="max")
    under the given policy, over path indices 0 .. n_paths-1."""
    if problem not in ("min", "max"):
        raise ValueError(f'problem must be "min" or "max", got {problem!r}')
    tau, n_switches, _, truncated = _outcomes(params, policy, x0, a0, config)
    n = config.n_paths
    n_truncated = int(truncated.sum())
    if n_truncated > 0.001 * n:
        raise TruncationExcess(
            f"{n_truncated} of {n} paths were truncated at max_time={config.max_time}; "
            "the estimate would be unreliable")
    sign = 1.0 if problem == "min" else -1.0
    cost = tau + (sign * params.cost) * n_switches
    mean = float(np.mean(cost))
    if n > 1:
        std_error = float(np.std(cost, ddof=1) / math.sqrt(n))
    else:
        std_error = math.inf
    return MCEstimate(
        mean_cost=mean,
        std_error=std_error,
        mean_tau=float(np.mean(tau)),
        mean_switches=float(np.mean(n_switches)),
        n_paths=n,
        n_truncated=n_truncated,
    )


def switch_pmf(params: ProblemParams, policy: Policy, x0: float, a0: DriftSign,
               config: SimConfig) -> np.ndarray:
    """Empirical distribution of the switch count; entry k is P(N = k)."""
    _, n_switches, _, _ = _outcomes(params, policy, x0, a0, config)
    counts = np.bincount(n_switches)
    return counts / counts.sum()
