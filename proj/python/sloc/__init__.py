"""Simulation and offline analysis for online routing under spatial locality."""

import json

from . import _sloc
from ._sloc import JsonError, SlocError

__all__ = [
    "SlocError",
    "JsonError",
    "validate_instance",
    "run",
    "opt",
    "opt_lower_bound",
    "evaluate_schedule",
    "star",
    "theoretical_bound",
    "policy_names",
]


def _text(instance):
    return instance if isinstance(instance, str) else json.dumps(instance)


def validate_instance(instance):
    """Parse and validate; returns the normalized instance dict."""
    return json.loads(_sloc.validate_instance(_text(instance)))


def run(instance, policy, raw=False, strict_lemma3=False):
    out = json.loads(_sloc.run(_text(instance), policy, raw, strict_lemma3))
    out["trace"] = [json.loads(line) for line in out["trace"].splitlines() if line]
    return out


def opt(instance):
    return json.loads(_sloc.opt(_text(instance)))


def opt_lower_bound(instance):
    return _sloc.opt_lower_bound(_text(instance))


def evaluate_schedule(schedule, instance):
    return json.loads(_sloc.evaluate_schedule(_text(schedule), _text(instance)))


def star(n, delta, policy="arbitrary-replan", homing=False):
    return json.loads(_sloc.star(n, delta, policy, homing))


def theoretical_bound(policy, instance):
    return json.loads(_sloc.theoretical_bound(policy, _text(instance)))


def policy_names():
    return list(_sloc.policy_names())
