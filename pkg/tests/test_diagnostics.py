import csv
import io
import time

import pytest

from driftswitch.closedform import critical_cost
from driftswitch.diagnostics import (
    CheckResult,
    check_ode_residual,
    check_scaling,
    check_smooth_fit,
    check_zero_cost_limit,
    report_csv,
    report_text,
    run_all,
)
from driftswitch.fbp import solve_max, solve_min
from driftswitch.model import ProblemParams

FULL_CHECKS = {
    "root-residual-min-t", "root-residual-min-s", "root-residual-max-s",
    "ordering-chain",
    "smooth-fit-min", "value-fit-min", "smooth-fit-max", "value-fit-max",
    "ode-residual-min", "ode-sign-min", "ode-residual-max", "ode-sign-max",
    "switch-gain-min", "switch-gain-min-interior", "switch-equality-min",
    "switch-gain-max", "switch-gain-max-interior", "switch-equality-max",
    "scaling-min", "scaling-max", "scaling-thresholds",
}


@pytest.mark.parametrize("mu,cost_frac", [
    (1.0, None),          # published instances use absolute costs below
    (0.1, 0.9),
    (5.0, 0.5),
    (20.0, 0.5),
    (2.0, 0.98),
])
def test_run_all_passes(mu, cost_frac):
    cost = 0.01 if cost_frac is None else cost_frac * critical_cost(mu)
    report = run_all(ProblemParams(mu, cost), 1001)
    failed = [c.name for c in report.checks if not c.passed]
    assert report.all_passed, failed
    assert {c.name for c in report.checks} == FULL_CHECKS
    assert report.grid_size == 1001


def test_run_all_passes_with_sigma():
    report = run_all(ProblemParams(2.0, 0.05, 0.5), 501)
    assert report.all_passed, [c.name for c in report.checks if not c.passed]


def test_run_all_degenerate():
    report = run_all(ProblemParams(1.0, 0.2), 501)
    assert report.all_passed, [c.name for c in report.checks if not c.passed]
    names = {c.name for c in report.checks}
    # no roots or free boundaries to check when the switching region collapses
    assert "root-residual-min-t" not in names
    assert "smooth-fit-min" not in names
    assert "ode-residual-min" in names


def test_pass_flag_definition():
    report = run_all(ProblemParams(1.0, 0.04), 201)
    for c in report.checks:
        assert c.passed == (c.max_violation <= c.threshold)


def test_check_result_boundary():
    assert CheckResult("x", 1e-9, 1e-9, True) == CheckResult("x", 1e-9, 1e-9, True)


def test_smooth_fit_entries():
    p = ProblemParams(1.0, 0.01)
    entries = check_smooth_fit(solve_min(p), solve_max(p))
    by_name = {e.name: e for e in entries}
    assert by_name["smooth-fit-min"].threshold == 1e-9
    assert by_name["value-fit-min"].threshold == 1e-12
    assert all(e.passed for e in entries)


def test_ode_residual_rejects_small_grid():
    p = ProblemParams(1.0, 0.01)
    with pytest.raises(ValueError):
        check_ode_residual(solve_min(p), solve_max(p), 9)


def test_scaling_entries():
    entries = check_scaling(1.0, 0.01, 2.0, 301)
    by_name = {e.name: e for e in entries}
    assert by_name["scaling-min"].max_violation < 1e-10
    assert by_name["scaling-max"].max_violation < 1e-10
    assert by_name["scaling-thresholds"].max_violation < 1e-12


def test_zero_cost_limit_entries():
    entries = check_zero_cost_limit(1.0, (1e-2, 1e-3, 1e-4, 1e-5, 1e-6))
    by_name = {e.name: e for e in entries}
    assert set(by_name) == {
        "zero-cost-a-monotone", "zero-cost-b-monotone", "zero-cost-b-below-half",
        "zero-cost-distance-monotone", "zero-cost-final-a", "zero-cost-final-b-gap",
        "zero-cost-final-distance",
    }
    assert all(e.passed for e in entries), [e.name for e in entries if not e.passed]
    assert by_name["zero-cost-final-distance"].max_violation < 1e-3


def test_zero_cost_limit_rejects_bad_sequence():
    with pytest.raises(ValueError):
        check_zero_cost_limit(1.0, (1e-3, 1e-2))  # not decreasing
    with pytest.raises(ValueError):
        check_zero_cost_limit(1.0, ())


def test_report_text_format():
    report = run_all(ProblemParams(1.0, 0.04), 201)
    text = report_text(report)
    lines = text.strip().splitlines()
    assert lines[0] == "instance: mu=1 cost=0.04 sigma=1 grid=201"
    assert len(lines) == len(report.checks) + 2
    assert all("PASS" in line for line in lines[1:-1])
    assert lines[-1] == f"{len(report.checks)} checks, 0 failed"


def test_report_csv_format():
    report = run_all(ProblemParams(1.0, 0.04), 201)
    rows = list(csv.reader(io.StringIO(report_csv(report))))
    assert rows[0] == ["check", "max_violation", "threshold", "pass"]
    assert len(rows) == len(report.checks) + 1
    for row in rows[1:]:
        float(row[1]); float(row[2])
        assert row[3] in ("true", "false")


def test_reports_are_stable_and_fast():
    p = ProblemParams(1.0, 0.01)
    t0 = time.perf_counter()
    a = run_all(p, 1001)
    elapsed = time.perf_counter() - t0
    b = run_all(p, 1001)
    assert a == b
    assert elapsed < 1.0
