from .compose import CompositionOperator, compose_field, composition_operator
from .matrices import (
    CoupledMatrices,
    CouplingCoefficients,
    CouplingContext,
    assemble_matrices,
    compute_delta,
    delta_direct,
    tail_size,
)

__all__ = [
    "CompositionOperator",
    "CoupledMatrices",
    "CouplingCoefficients",
    "CouplingContext",
    "assemble_matrices",
    "compose_field",
    "composition_operator",
    "compute_delta",
    "delta_direct",
    "tail_size",
]
