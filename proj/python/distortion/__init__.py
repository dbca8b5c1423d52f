"""Distortion witnesses for groups of homeomorphisms.

Thin wrapper over the C++ core in ``distortion._core``.
"""

from ._core import (
    Error,
    MapExpr,
    axis_push,
    circle_demo,
    compose,
    foliation_decompose,
    identity,
    inverse,
    localized_translation,
    parse_map,
    plan_table,
    power_exact,
    radial,
    random_perturbation,
    run,
    sphere_demo,
    twist,
    witnesses,
)

__all__ = [
    "Error",
    "MapExpr",
    "axis_push",
    "circle_demo",
    "compose",
    "foliation_decompose",
    "identity",
    "inverse",
    "localized_translation",
    "parse_map",
    "plan_table",
    "power_exact",
    "radial",
    "random_perturbation",
    "run",
    "sphere_demo",
    "twist",
    "witnesses",
]

__version__ = "0.1.0"
