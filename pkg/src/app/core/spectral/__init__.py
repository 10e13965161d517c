from .fluid import DivergenceFreeSubspace, FluidEigenBasis, build_divfree_subspace, solve_fluid_eigenproblem
from .solid import SolidEigenBasis, solve_solid_eigenproblem

__all__ = [
    "DivergenceFreeSubspace",
    "FluidEigenBasis",
    "SolidEigenBasis",
    "build_divfree_subspace",
    "solve_fluid_eigenproblem",
    "solve_solid_eigenproblem",
]
