"""Python bindings for the vpd visual-program toolkit."""

import json as _json

from ._core import (
    ArityMismatch,
    ConfigError,
    ProgramSyntaxError,
    SceneError,
    accuracy_exact,
    accuracy_vqa,
    annotate,
    augment,
    canonicalize,
    check,
    extract,
    gen_bench,
    instantiate,
    ngram_entropy,
    rename_variables,
    string_slots,
)
from ._core import execute as _execute

__version__ = "0.1.0"


def execute(program, scene, step_budget=10000):
    """Run `program` on a scene given as a dict or a JSON string."""
    if not isinstance(scene, str):
        scene = _json.dumps(scene)
    return _execute(program, scene, step_budget)


__all__ = [
    "ArityMismatch",
    "ConfigError",
    "ProgramSyntaxError",
    "SceneError",
    "accuracy_exact",
    "accuracy_vqa",
    "annotate",
    "augment",
    "canonicalize",
    "check",
    "execute",
    "extract",
    "gen_bench",
    "instantiate",
    "ngram_entropy",
    "rename_variables",
    "string_slots",
]
