"""Tight-binding chain coupled to a single cavity mode by Peierls substitution."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    FermiSea,
    FermiSeaMode,
    ModelParams,
    displacement_from_quadrature,
    fermi_coefficients,
    landau_gradient,
    landau_potential,
    mean_field_energy_surface,
    quadrature_from_displacement,
)

__all__ = [
    "FermiSea",
    "FermiSeaMode",
    "ModelParams",
    "displacement_from_quadrature",
    "fermi_coefficients",
    "landau_gradient",
    "landau_potential",
    "mean_field_energy_surface",
    "quadrature_from_displacement",
]
