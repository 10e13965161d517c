from .grids import FluidDomainGrid, GeometryConfig, RectGrid, SolidReferenceGrid, build_grids, check_immersion
from .motion import (
    AssumptionReport,
    IdentityMotion,
    Motion,
    PrescribedMotion,
    RotationMotion,
    ShearMotion,
    TranslationMotion,
    verify_assumption,
)
from .quadrature import gauss_rule, q1_derivatives, q1_values

__all__ = [
    "AssumptionReport",
    "FluidDomainGrid",
    "GeometryConfig",
    "IdentityMotion",
    "Motion",
    "PrescribedMotion",
    "RectGrid",
    "RotationMotion",
    "ShearMotion",
    "SolidReferenceGrid",
    "TranslationMotion",
    "build_grids",
    "check_immersion",
    "gauss_rule",
    "q1_derivatives",
    "q1_values",
    "verify_assumption",
]
