"""Pressure recovery from the momentum residual through a stabilized Schur complement.

Pressures are piecewise constant with zero mean. The pairing (p, div v) is
realized by the cell-by-dof divergence matrix restricted to interior
velocity unknowns; the Schur complement uses the vector Laplacian as the
velocity inner product, so the momentum residual is measured in the
corresponding discrete dual norm.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from ..config import get_settings
from ..coupling.matrices import CoupledMatrices
from ..evolution.state import GalerkinState, PhysicalParams
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis

logger = logging.getLogger(__name__)


class PressureSolver:
    """Factorized pressure Schur complement of one fluid grid.

    Spurious pressure modes (the kernel of the transposed pairing besides
    constants) are penalized with ``mu Mp Q Q^T Mp``; constants are penalized
    the same way, so the stabilized matrix is symmetric positive definite and
    recovered pressures are orthogonal to both.
    """

    def __init__(self, fluid: FluidEigenBasis, kernel_rtol: float | None = None, inf_sup_threshold: float | None = None) -> None:
        settings = get_settings()
        kernel_rtol = settings.pressure_kernel_rtol if kernel_rtol is None else kernel_rtol
        inf_sup_threshold = settings.inf_sup_threshold if inf_sup_threshold is None else inf_sup_threshold

        grid = fluid.grid
        self.fluid = fluid
        self.interior = grid.interior_dofs
        self.pairing = fluid.divergence[:, self.interior].tocsc()
        self.cell_area = np.full(grid.n_cells, grid.cell_area)
        laplacian = fluid.laplacian[self.interior][:, self.interior].tocsc()
        self._velocity_lu = spla.splu(laplacian)

        solved = self._velocity_lu.solve(self.pairing.T.toarray())
        schur = self.pairing @ solved
        schur = 0.5 * (schur + schur.T)

        mass = np.diag(self.cell_area)
        constant = np.full(grid.n_cells, 1.0 / np.sqrt(self.cell_area.sum()))
        weighted_constant = self.cell_area * constant
        scale = float(la.eigh(schur, mass, eigvals_only=True)[-1])
        shifted = schur + 2.0 * scale * np.outer(weighted_constant, weighted_constant)
        theta, vectors = la.eigh(shifted, mass)

        # the constant mode was lifted to the top of the spectrum
        theta, vectors = theta[:-1], vectors[:, :-1]
        spurious = theta < kernel_rtol * scale
        self.kernel_dimension = int(spurious.sum())
        self.inf_sup = float(np.sqrt(max(theta[0], 0.0)))
        self.inf_sup_filtered = float(np.sqrt(theta[~spurious][0])) if (~spurious).any() else 0.0
        self.stabilization = float(np.mean(np.diag(schur)) / grid.cell_area)

        kernel = np.column_stack([vectors[:, spurious], constant]) if self.kernel_dimension else constant[:, None]
        self._kernel_weighted = self.cell_area[:, None] * kernel
        stabilized = schur + self.stabilization * self._kernel_weighted @ self._kernel_weighted.T
        self.stabilized_min_eigenvalue = float(
            min(theta[~spurious].min(initial=np.inf), self.stabilization)
        )
        self._schur_factor = la.cho_factor(stabilized)

        if self.inf_sup < inf_sup_threshold:
            logger.warning(
                "Discrete inf-sup estimate %.3e is below %.1e (%d spurious pressure modes); stabilization engaged",
                self.inf_sup, inf_sup_threshold, self.kernel_dimension,
            )
        logger.info(
            "Pressure solver ready: %d cells, inf-sup %.3e (filtered %.3e)",
            grid.n_cells, self.inf_sup, self.inf_sup_filtered,
        )

    def dual_norm(self, residual_interior: np.ndarray) -> float:
        return float(np.sqrt(max(residual_interior @ self._velocity_lu.solve(residual_interior), 0.0)))

    def solve(self, load: np.ndarray) -> tuple[np.ndarray, float]:
        """Least-squares pressure with (p, div v) = load(v) for interior v.

        Args:
            load: Full nodal load vector (2 * n_nodes,) or interior restriction.

        Returns:
            (cell pressures with zero mean, dual norm of load - D^T p).
        """
        load = np.asarray(load, dtype=float)
        if load.size != self.interior.size:
            load = load[self.interior]
        # rhs lies in the range of the pairing, so it has no component along penalized modes
        rhs = self.pairing @ self._velocity_lu.solve(load)
        pressure = la.cho_solve(self._schur_factor, rhs)
        pressure -= (self.cell_area @ pressure) / self.cell_area.sum()
        residual = load - self.pairing.T @ pressure
        return pressure, self.dual_norm(residual)

    def mean(self, pressure: np.ndarray) -> float:
        return float(self.cell_area @ pressure / self.cell_area.sum())

    def l2_norm(self, pressure: np.ndarray) -> float:
        return float(np.sqrt(self.cell_area @ pressure**2))

    def manufactured(self, velocity: np.ndarray) -> np.ndarray:
        """A zero-mean pressure in the range of the pairing, p = D v for an interior field v."""
        return self.pairing @ np.asarray(velocity, dtype=float)


def momentum_load(
    state: GalerkinState,
    alpha_rate: np.ndarray,
    multiplier: np.ndarray,
    matrices: CoupledMatrices,
    fluid: FluidEigenBasis,
    solid: SolidEigenBasis,
    params: PhysicalParams,
) -> np.ndarray:
    """Full nodal load l(v) = rho_f (du/dt, v) + a(u, v) + c(lambda, v o X(t))."""
    u = fluid.field(state.alpha)
    u_rate = fluid.field(alpha_rate)
    load = params.rho_f * (fluid.mass @ u_rate) + fluid.stiffness @ u

    # v o X(t) is represented by its nodal interpolant at the mapped solid nodes
    interpolation = matrices.coefficients.operator.vector_operator()
    lam = solid.modes[:, : np.size(multiplier)] @ np.asarray(multiplier)
    load += interpolation.T @ (solid.c_form @ lam)
    return load


def divergence_free_residuals(load: np.ndarray, pressure: np.ndarray, fluid: FluidEigenBasis) -> np.ndarray:
    """|l(psi_j) - (p, div psi_j)| for j <= m."""
    return np.abs(fluid.modes.T @ (load - fluid.divergence.T @ pressure))



def recover_pressure(
    state: GalerkinState,
    alpha_rate: np.ndarray,
    multiplier: np.ndarray,
    matrices: CoupledMatrices,
    fluid: FluidEigenBasis,
    solid: SolidEigenBasis,
    params: PhysicalParams,
    solver: PressureSolver | None = None,
) -> tuple[np.ndarray, float]:
    """Zero-mean pressure with (p, div v) = l(v) and the dual norm of the momentum residual."""
    solver = solver or PressureSolver(fluid)
    return solver.solve(momentum_load(state, alpha_rate, multiplier, matrices, fluid, solid, params))
