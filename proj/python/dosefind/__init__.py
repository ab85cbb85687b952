"""Bayesian dose-finding designs backed by a C++ core.

``call(endpoint, request)`` accepts the same JSON bodies as the HTTP service
(``POST /v1/<endpoint>``) and returns the decoded response.
"""

import json

from . import _core
from ._core import (
    SamplerError,
    ValidationError,
    clopper_pearson,
    enumerate_cohort_outcomes,
    joint_prob,
    parse_outcomes,
    solve_contour_exponent,
)

__all__ = [
    "SamplerError",
    "ValidationError",
    "call",
    "call_raw",
    "clopper_pearson",
    "enumerate_cohort_outcomes",
    "fit_crm",
    "fit_efftox",
    "dtp_crm",
    "joint_prob",
    "parse_outcomes",
    "solve_contour_exponent",
]


def call_raw(endpoint: str, request) -> str:
    """Response body exactly as the service would send it."""
    if not isinstance(request, str):
        request = json.dumps(request)
    return _core.call(endpoint, request)


def call(endpoint: str, request) -> dict:
    return json.loads(call_raw(endpoint, request))


def fit_crm(**request) -> dict:
    return call("fit/crm", request)


def fit_efftox(**request) -> dict:
    return call("fit/efftox", request)


def dtp_crm(**request) -> dict:
    return call("dtp/crm", request)
