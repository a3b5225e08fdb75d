"""Discontinuous Galerkin solver for the 2D advection-diffusion-reaction air pollution model."""

from ._core import (
    ConfigError,
    EvalError,
    InvalidArgument,
    NumericalError,
    ParseError,
    canonical,
    coercivity,
    convergence,
    differentiate,
    evaluate,
    mesh_summary,
    n_loc,
    operators,
    parse_config,
    presets,
    run_command,
)

__all__ = [
    "ConfigError",
    "EvalError",
    "InvalidArgument",
    "NumericalError",
    "ParseError",
    "canonical",
    "coercivity",
    "convergence",
    "differentiate",
    "evaluate",
    "mesh_summary",
    "n_loc",
    "operators",
    "parse_config",
    "presets",
    "run_command",
]
