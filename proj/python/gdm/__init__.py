"""Gradient discretisation solver for miscible displacement."""

from ._core import (
    ConfigError,
    Discretisation,
    GdmError,
    NumericalError,
    RunConfig,
    default_config,
    exact_c,
    interpolate,
    norm_ell,
    norm_para,
    parse_config,
    psi,
    quality,
    run,
    scheme_a,
    scheme_b,
    tensor_d,
    truncate,
    viscosity,
)

__all__ = [
    "ConfigError",
    "Discretisation",
    "GdmError",
    "NumericalError",
    "RunConfig",
    "default_config",
    "exact_c",
    "interpolate",
    "norm_ell",
    "norm_para",
    "parse_config",
    "psi",
    "quality",
    "run",
    "scheme_a",
    "scheme_b",
    "tensor_d",
    "truncate",
    "viscosity",
]
