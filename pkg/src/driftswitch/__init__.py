"""Drift-switching control of a Brownian particle on the unit interval.

Closed-form threshold solver for the expulsion / confinement problems with
switching cost, plus Monte Carlo verification, diagnostics, a CLI, and an
HTTP service wrapper.
"""
from .model import DriftSign, NonPositiveParameter, OutOfDomain, ProblemParams, State, validate_params

__version__ = "0.1.0"

__all__ = [
    "DriftSign",
    "NonPositiveParameter",
    "OutOfDomain",
    "ProblemParams",
    "State",
    "validate_params",
    "__version__",
]
