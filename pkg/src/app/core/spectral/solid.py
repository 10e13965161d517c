"""H1(B) eigenbasis of the c-form on the solid reference body."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from . import assembly
from .fluid import fix_signs
from ..errors import BasisSizeError
from ..geometry.grids import SolidReferenceGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SolidEigenBasis:
    """First R eigenpairs of c(chi, mu) = lambda (chi, mu)_B, c-orthonormal.

    The c-form is componentwise, so each scalar Neumann pair (v, lambda)
    yields the vector pair (v, 0), (0, v) in that order.
    """

    grid: SolidReferenceGrid
    eigenvalues: np.ndarray
    modes: np.ndarray
    scalar_mass: sp.csr_matrix
    scalar_stiffness: sp.csr_matrix

    @property
    def R(self) -> int:
        return self.eigenvalues.size

    @property
    def c(self) -> np.ndarray:
        """||chi_r||^2_{0,B} = 1 / lambda_r."""
        return 1.0 / self.eigenvalues

    @property
    def d(self) -> np.ndarray:
        """||grad chi_r||^2_{0,B} = 1 - c_r."""
        return np.maximum(1.0 - self.c, 0.0)

    @property
    def mass(self) -> sp.csr_matrix:
        return sp.kron(self.scalar_mass, sp.identity(2), format="csr")

    @property
    def stiffness(self) -> sp.csr_matrix:
        return sp.kron(self.scalar_stiffness, sp.identity(2), format="csr")

    @property
    def c_form(self) -> sp.csr_matrix:
        return self.mass + self.stiffness

    def field(self, beta: np.ndarray) -> np.ndarray:
        beta = np.asarray(beta)
        return self.modes[:, : beta.shape[0]] @ beta

    def c_gram(self) -> np.ndarray:
        return self.modes.T @ (self.c_form @ self.modes)

    def l2_gram(self) -> np.ndarray:
        return self.modes.T @ (self.mass @ self.modes)

    def gradient_gram(self) -> np.ndarray:
        return self.modes.T @ (self.stiffness @ self.modes)

    def residuals(self) -> np.ndarray:
        K = self.c_form
        M = self.mass
        out = np.empty(self.R)
        for r in range(self.R):
            x = self.modes[:, r]
            out[r] = np.linalg.norm(K @ x - self.eigenvalues[r] * (M @ x)) / np.linalg.norm(x)
        return out

    def truncate(self, R: int) -> "SolidEigenBasis":
        if not 1 <= R <= self.R:
            raise BasisSizeError(f"cannot truncate a basis of {self.R} solid modes to {R}")
        return replace(self, eigenvalues=self.eigenvalues[:R], modes=self.modes[:, :R])

    def project(self, values: np.ndarray, count: int | None = None) -> np.ndarray:
        """Coefficients (v, chi_r)_B / c_r of a nodal vector field on the first ``count`` modes."""
        count = self.R if count is None else count
        return (self.modes[:, :count].T @ (self.mass @ values)) / self.c[:count]


def solve_solid_eigenproblem(grid: SolidReferenceGrid, R: int) -> SolidEigenBasis:
    """Compute the first R vector eigenpairs of the H1(B) form with natural boundary conditions.

    Raises:
        BasisSizeError: R is not in [1, number of solid velocity unknowns].
    """
    n_unknowns = 2 * grid.n_nodes
    if not 1 <= R <= n_unknowns:
        raise BasisSizeError(f"requested R={R} solid modes but the solid grid has {n_unknowns} velocity unknowns")

    M1 = assembly.scalar_mass(grid)
    K1 = assembly.scalar_stiffness(grid)
    n_scalar = math.ceil(R / 2)
    mu, v = la.eigh((K1 + M1).toarray(), M1.toarray(), subset_by_index=[0, n_scalar - 1])
    v = fix_signs(v)

    modes = np.zeros((n_unknowns, 2 * n_scalar))
    eigenvalues = np.repeat(mu, 2)
    scaled = v / np.sqrt(mu)
    modes[0::2, 0::2] = scaled
    modes[1::2, 1::2] = scaled

    logger.info("Solid eigenbasis: R=%d, lambda_1=%.6g, lambda_R=%.6g", R, mu[0], eigenvalues[R - 1])
    return SolidEigenBasis(
        grid=grid,
        eigenvalues=eigenvalues[:R],
        modes=modes[:, :R],
        scalar_mass=M1,
        scalar_stiffness=K1,
    )
