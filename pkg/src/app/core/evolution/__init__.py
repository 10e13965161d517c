from .integrator import (
    Frame,
    Trajectory,
    check_mass,
    corrected_mass,
    integrate,
    midpoint_update,
    ode_rhs,
    step,
    step_count,
)
from .state import (
    GalerkinState,
    InitialData,
    PhysicalParams,
    check_compatibility,
    elastic_reference,
    galerkin_energy,
    project_initial_data,
    reference_coefficients,
)

__all__ = [
    "Frame",
    "GalerkinState",
    "InitialData",
    "PhysicalParams",
    "Trajectory",
    "check_compatibility",
    "check_mass",
    "corrected_mass",
    "elastic_reference",
    "galerkin_energy",
    "integrate",
    "midpoint_update",
    "ode_rhs",
    "project_initial_data",
    "reference_coefficients",
    "step",
    "step_count",
]
