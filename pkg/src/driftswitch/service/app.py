"""HTTP facade over the solver, simulator, and self-checks.

Thin wrapper: every route builds the same library objects the CLI does and
returns their fields verbatim. Run with `uvicorn driftswitch.service:app`.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..closedform import critical_cost, expected_exit_time
from ..diagnostics import run_all
from ..fbp import (
    instance_critical_cost,
    solve_max,
    solve_min,
    value_max,
    value_min,
)
from ..mc import SimConfig, TruncationExcess, estimate_cost
from ..model import DriftSign, NonPositiveParameter, OutOfDomain, ProblemParams
from ..policy import (
    constant_policy,
    optimal_max_policy,
    optimal_min_policy,
    perturbed_min_policy,
)
from ..rootfind import MaxIterationsExceeded, NoSignChange
from .schemas import (
    CheckEntry,
    CheckRequest,
    CheckResponse,
    CriticalCostResponse,
    CurveRequest,
    CurveResponse,
    Instance,
    SimulateRequest,
    SimulateResponse,
    SolveResponse,
    ValueRequest,
    ValueResponse,
)


def _params(inst: Instance) -> ProblemParams:
    return ProblemParams(inst.mu, inst.cost, inst.sigma)


def create_app() -> FastAPI:
    app = FastAPI(title="driftswitch", version=__version__)

    @app.exception_handler(NonPositiveParameter)
    @app.exception_handler(OutOfDomain)
    @app.exception_handler(TruncationExcess)
    async def _reject(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(NoSignChange)
    @app.exception_handler(MaxIterationsExceeded)
    async def _numeric_failure(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=500,
                            content={"detail": f"solver failed: {exc}"})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/solve", response_model=SolveResponse)
    def solve(inst: Instance) -> SolveResponse:
        params = _params(inst)
        smin = solve_min(params)
        smax = solve_max(params)
        return SolveResponse(
            mu=params.mu, cost=params.cost, sigma=params.sigma,
            a=smin.a, b=smin.b, a_max=smax.a, b_max=smax.b,
            alpha=smin.alpha, beta=smin.beta,
            gamma=smax.gamma, delta=smax.delta,
            critical_cost=instance_critical_cost(params),
            degenerate=smin.degenerate,
        )

    @app.get("/critical-cost", response_model=CriticalCostResponse)
    def critical(mu: float = Query(gt=0),
                 sigma: float = Query(default=1.0, gt=0)) -> CriticalCostResponse:
        s2 = sigma * sigma
        return CriticalCostResponse(mu=mu, sigma=sigma,
                                    critical_cost=critical_cost(mu / s2) / s2)

    @app.post("/value", response_model=ValueResponse)
    def value(req: ValueRequest) -> ValueResponse:
        params = _params(req.instance)
        drift = DriftSign(req.drift)
        if req.problem == "min":
            v = value_min(solve_min(params), req.x, drift)
        else:
            v = value_max(solve_max(params), req.x, drift)
        return ValueResponse(value=v)

    @app.post("/curve", response_model=CurveResponse)
    def curve(req: CurveRequest) -> CurveResponse:
        params = _params(req.instance)
        smin = solve_min(params)
        smax = solve_max(params)
        x = np.linspace(0.0, 1.0, req.grid)
        mu_eff = params.mu / params.sigma**2
        scale = 1.0 / params.sigma**2
        return CurveResponse(
            x=x.tolist(),
            v_min_up=value_min(smin, x, DriftSign.UP).tolist(),
            v_min_down=value_min(smin, x, DriftSign.DOWN).tolist(),
            v_max_up=value_max(smax, x, DriftSign.UP).tolist(),
            v_max_down=value_max(smax, x, DriftSign.DOWN).tolist(),
            f_plus=(scale * expected_exit_time(mu_eff, x)).tolist(),
            f_minus=(scale * expected_exit_time(-mu_eff, x)).tolist(),
        )

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        params = _params(req.instance)
        if req.policy == "optimal-min":
            policy, problem = optimal_min_policy(solve_min(params)), "min"
        elif req.policy == "optimal-max":
            policy, problem = optimal_max_policy(solve_max(params)), "max"
        elif req.policy == "constant":
            policy, problem = constant_policy(DriftSign(req.drift)), "min"
        else:
            policy = perturbed_min_policy(solve_min(params), req.shift)
            problem = "min"
        config = SimConfig(dt=req.dt, n_paths=req.paths, seed=req.seed,
                           max_time=req.max_time, bridge_correction=req.bridge)
        est = estimate_cost(params, policy, req.x0, DriftSign(req.drift),
                            config, problem)
        return SimulateResponse(
            policy=policy.description, problem=problem,
            mean_cost=est.mean_cost, std_error=est.std_error,
            mean_tau=est.mean_tau, mean_switches=est.mean_switches,
            n_paths=est.n_paths, n_truncated=est.n_truncated,
        )

    @app.post("/check", response_model=CheckResponse)
    def check(req: CheckRequest) -> CheckResponse:
        params = _params(req.instance)
        report = run_all(params, req.grid)
        return CheckResponse(
            instance=Instance(mu=params.mu, cost=params.cost,
                              sigma=params.sigma),
            grid_size=report.grid_size,
            all_passed=report.all_passed,
            checks=[CheckEntry(name=c.name, max_violation=c.max_violation,
                               threshold=c.threshold, passed=c.passed)
                    for c in report.checks],
        )

    return app


app = create_app()
