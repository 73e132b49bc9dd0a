"""Rural school bus routing and scheduling with mixed loading."""

import json

# The extension links the HiGHS library shipped with highspy.
import highspy  # noqa: F401

from . import _sbrsp
from ._sbrsp import SbrspError, bpr_time, calibrate_A, choice_probability, percent_change

__all__ = [
    "SbrspError",
    "bpr_time",
    "calibrate_A",
    "choice_probability",
    "generate",
    "iterate",
    "metrics",
    "percent_change",
    "solve",
    "validate",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def validate(instance):
    return json.loads(_sbrsp.validate(_text(instance)))


def generate(spec=None, seed=0):
    return json.loads(_sbrsp.generate(_text(spec or {}), seed))


def solve(instance, pipeline="hracssas4", config=None):
    return json.loads(_sbrsp.solve(_text(instance), pipeline, _text(config) if config else ""))


def metrics(instance, solution):
    return json.loads(_sbrsp.metrics(_text(instance), _text(solution)))


def iterate(instance, config=None):
    return json.loads(_sbrsp.iterate(_text(instance), _text(config) if config else ""))
