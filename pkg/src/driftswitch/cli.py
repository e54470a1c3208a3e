"""Command-line surface.

One verb per capability: solve an instance, print the critical cost,
evaluate the value function, dump value curves as CSV, run Monte Carlo
simulations, and run the self-check suite.

Exit codes: 0 success, 1 usage error, 2 domain error (bad parameter values),
3 solver or internal failure (including a failing check suite).
"""
from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import __version__
from .closedform import critical_cost, expected_exit_time
from .diagnostics import report_csv, report_text, run_all
from .fbp import (instance_critical_cost, solve_max, solve_min, value_max,
                  value_min)
from .mc import SimConfig, TruncationExcess, estimate_cost
from .model import (DriftSign, NonPositiveParameter, OutOfDomain,
                    ProblemParams, _require_positive)
from .policy import (constant_policy, optimal_max_policy, optimal_min_policy,
                     perturbed_min_policy)
from .rootfind import MaxIterationsExceeded, NoSignChange


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the contract here is 1
    def error(self, message):
        raise _UsageError(message)


def _fmt(value: float) -> str:
    # + 0.0 drops the sign of negative zero
    return f"{value + 0.0:.15g}"


def _add_instance_flags(sp) -> None:
    sp.add_argument("--mu", type=float, required=True,
                    help="drift magnitude (> 0)")
    sp.add_argument("--cost", type=float, required=True,
                    help="cost per drift switch (> 0)")
    sp.add_argument("--sigma", type=float, default=1.0,
                    help="noise scale (default 1)")


def _build_parser() -> _Parser:
    p = _Parser(prog="driftswitch",
                description="Threshold policies and values for a two-sided "
                            "drift-switching exit problem on [0, 1].")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    sp = sub.add_parser("solve", help="print thresholds and ODE coefficients")
    _add_instance_flags(sp)

    sp = sub.add_parser("critical-cost",
                        help="cost above which switching never pays")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--sigma", type=float, default=1.0)

    sp = sub.add_parser("value", help="evaluate the optimal expected cost")
    _add_instance_flags(sp)
    sp.add_argument("--x", type=float, required=True, help="start position in [0, 1]")
    sp.add_argument("--drift", type=int, choices=(1, -1), default=1,
                    help="initial drift sign (default +1)")
    sp.add_argument("--problem", choices=("min", "max"), default="min",
                    help="min: leave fast; max: stay long (default min)")

    sp = sub.add_parser("curve", help="CSV of value curves on a uniform grid")
    _add_instance_flags(sp)
    sp.add_argument("--grid", type=int, default=1001, help="number of grid points")

    sp = sub.add_parser("simulate", help="Monte Carlo estimate under a policy")
    _add_instance_flags(sp)
    sp.add_argument("--policy", required=True,
                    choices=("optimal-min", "optimal-max", "constant", "perturbed"))
    sp.add_argument("--shift", type=float, default=None,
                    help="threshold shift (required with --policy perturbed)")
    sp.add_argument("--paths", type=int, default=100_000)
    sp.add_argument("--dt", type=float, default=1e-4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--x0", type=float, default=0.5)
    sp.add_argument("--drift", type=int, choices=(1, -1), default=1)
    sp.add_argument("--max-time", type=float, default=1e4)
    sp.add_argument("--no-bridge", action="store_true",
                    help="disable the within-step boundary-crossing test")

    sp = sub.add_parser("check", help="run the self-check suite")
    _add_instance_flags(sp)
    sp.add_argument("--grid", type=int, default=1001)
    sp.add_argument("--format", choices=("text", "csv"), default="text")
    return p


def _cmd_solve(args) -> int:
    params = ProblemParams(args.mu, args.cost, args.sigma)
    smin = solve_min(params)
    smax = solve_max(params)
    rows = [
        ("a", _fmt(smin.a)),
        ("b", _fmt(smin.b)),
        ("a_max", _fmt(smax.a)),
        ("b_max", _fmt(smax.b)),
        ("alpha", _fmt(smin.alpha)),
        ("beta", _fmt(smin.beta)),
        ("gamma", _fmt(smax.gamma)),
        ("delta", _fmt(smax.delta)),
        ("critical_cost", _fmt(instance_critical_cost(params))),
        ("degenerate", "true" if smin.degenerate else "false"),
    ]
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"{key:<{width}}  {val}")
    return 0


def _cmd_critical_cost(args) -> int:
    sigma = _require_positive("sigma", args.sigma)
    sigma2 = sigma * sigma
    print(_fmt(critical_cost(args.mu / sigma2) / sigma2))
    return 0


def _cmd_value(args) -> int:
    params = ProblemParams(args.mu, args.cost, args.sigma)
    if args.problem == "min":
        v = value_min(solve_min(params), args.x, DriftSign(args.drift))
    else:
        v = value_max(solve_max(params), args.x, DriftSign(args.drift))
    print(_fmt(v))
    return 0


def _cmd_curve(args) -> int:
    if args.grid < 2:
        raise _UsageError("--grid must be at least 2")
    params = ProblemParams(args.mu, args.cost, args.sigma)
    smin = solve_min(params)
    smax = solve_max(params)
    x = np.linspace(0.0, 1.0, args.grid)
    mu_eff = params.mu / params.sigma**2
    scale = 1.0 / params.sigma**2
    cols = (
        x,
        value_min(smin, x, DriftSign.UP),
        value_min(smin, x, DriftSign.DOWN),
        value_max(smax, x, DriftSign.UP),
        value_max(smax, x, DriftSign.DOWN),
        scale * expected_exit_time(mu_eff, x),
        scale * expected_exit_time(-mu_eff, x),
    )
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["x", "V_min_up", "V_min_down", "V_max_up", "V_max_down",
                     "f_plus", "f_minus"])
    for row in zip(*cols):
        writer.writerow(_fmt(v) for v in row)
    return 0


def _cmd_simulate(args) -> int:
    params = ProblemParams(args.mu, args.cost, args.sigma)
    if args.policy == "optimal-min":
        policy, problem = optimal_min_policy(solve_min(params)), "min"
    elif args.policy == "optimal-max":
        policy, problem = optimal_max_policy(solve_max(params)), "max"
    elif args.policy == "constant":
        policy, problem = constant_policy(DriftSign(args.drift)), "min"
    else:
        if args.shift is None:
            raise _UsageError("--shift is required with --policy perturbed")
        policy, problem = perturbed_min_policy(solve_min(params), args.shift), "min"
    config = SimConfig(dt=args.dt, n_paths=args.paths, seed=args.seed,
                       max_time=args.max_time,
                       bridge_correction=not args.no_bridge)
    est = estimate_cost(params, policy, args.x0, DriftSign(args.drift),
                        config, problem)
    print(f"policy        {policy.description}")
    print(f"problem       {problem}")
    print(f"mean_cost     {_fmt(est.mean_cost)}")
    print(f"std_error     {_fmt(est.std_error)}")
    print(f"mean_tau      {_fmt(est.mean_tau)}")
    print(f"mean_switches {_fmt(est.mean_switches)}")
    print(f"n_paths       {est.n_paths}")
    print(f"n_truncated   {est.n_truncated}")
    return 0


def _cmd_check(args) -> int:
    if args.grid < 10:
        raise _UsageError("--grid must be at least 10")
    params = ProblemParams(args.mu, args.cost, args.sigma)
    report = run_all(params, args.grid)
    if args.format == "csv":
        sys.stdout.write(report_csv(report))
    else:
        print(report_text(report))
    if not report.all_passed:
        print("self-check failed", file=sys.stderr)
        return 3
    return 0


_DISPATCH = {
    "solve": _cmd_solve,
    "critical-cost": _cmd_critical_cost,
    "value": _cmd_value,
    "curve": _cmd_curve,
    "simulate": _cmd_simulate,
    "check": _cmd_check,
}


def run(argv=None) -> int:
    """Execute one CLI invocation and return its exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (NonPositiveParameter, OutOfDomain) as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 2
    except (NoSignChange, MaxIterationsExceeded, TruncationExcess) as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return 3
    except SystemExit as e:
        # argparse uses this for --help/--version
        return int(e.code) if e.code else 0
    except Exception as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
