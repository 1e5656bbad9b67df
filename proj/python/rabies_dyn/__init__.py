"""Twelve-compartment rabies transmission model."""

from ._core import (
    ConfigError,
    Dataset,
    RabiesError,
    __version__,
    compartments,
    default_params,
    dfe_stability,
    fit,
    generate_synthetic,
    next_generation_matrix,
    r0,
    reference_initial_condition,
    run,
    sensitivity,
    simulate,
)

__all__ = [
    "ConfigError",
    "Dataset",
    "RabiesError",
    "__version__",
    "compartments",
    "default_params",
    "dfe_stability",
    "fit",
    "generate_synthetic",
    "next_generation_matrix",
    "r0",
    "reference_initial_condition",
    "run",
    "sensitivity",
    "simulate",
]
