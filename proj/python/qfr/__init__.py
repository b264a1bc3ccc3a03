"""Quantum fluctuation relations with a quantum control: scenario runner and a few direct entry points."""

import json

from . import _core
from ._core import (
    QfrError,
    two_qubit_forward_00,
    two_qubit_maps,
    two_qubit_reverse_01,
    violation_closed_form,
)

__all__ = [
    "QfrError",
    "scenarios",
    "defaults",
    "run",
    "render",
    "particle_example",
    "two_qubit_forward_00",
    "two_qubit_maps",
    "two_qubit_reverse_01",
    "violation_closed_form",
]


def scenarios():
    return list(_core.scenario_names())


def defaults(name):
    return json.loads(_core.scenario_defaults(name))


def run(name, seed=None, **params):
    """Run a scenario and return its report as a dict (keys: scenario, passed, values, checks, ...)."""
    return json.loads(_core.run_scenario(name, json.dumps(params), seed, "json"))


def render(name, fmt="text", seed=None, **params):
    return _core.run_scenario(name, json.dumps(params), seed, fmt)


def particle_example(scheme="fd5", n_points=512, y_min=-18.0, y_max=18.0):
    return _core.run_h3(scheme, n_points, y_min, y_max)
