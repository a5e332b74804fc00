"""Phase-field mean curvature flow with the double obstacle potential."""

from ._obstacle_mcf import (
    Error,
    Potential,
    profile_check,
    initial_field,
    parse_config,
    run,
    sigma_delta,
    sigma_delta_closed_form,
    sphere_radius_exact,
    stability_limit,
    zero_level,
)

__all__ = [
    "Error",
    "Potential",
    "profile_check",
    "initial_field",
    "parse_config",
    "run",
    "sigma_delta",
    "sigma_delta_closed_form",
    "sphere_radius_exact",
    "stability_limit",
    "zero_level",
]
