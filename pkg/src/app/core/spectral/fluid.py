"""Divergence-free eigenbasis of the viscous form on the fluid box."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from . import assembly
from ..errors import BasisSizeError
from ..geometry.grids import FluidDomainGrid

logger = logging.getLogger(__name__)


def fix_signs(vectors: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Flip columns so that the first significantly nonzero entry is positive."""
    out = np.array(vectors, dtype=float, copy=True)
    for k in range(out.shape[1]):
        column = out[:, k]
        significant = np.flatnonzero(np.abs(column) > rtol * np.abs(column).max())
        if significant.size and column[significant[0]] < 0.0:
            out[:, k] = -column
    return out


@dataclass(frozen=True, eq=False)
class DivergenceFreeSubspace:
    """Euclidean-orthonormal basis of zero-trace fields with vanishing discrete divergence."""

    basis: np.ndarray
    interior_dofs: np.ndarray
    divergence: sp.csr_matrix
    n_interior_dofs: int
    divergence_rank: int

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def embed(self, reduced: np.ndarray, n_dofs: int) -> np.ndarray:
        """Lift reduced coordinates (k,) or (k, m) to full nodal vectors with zero boundary values."""
        reduced = np.asarray(reduced)
        full = np.zeros((n_dofs,) + reduced.shape[1:])
        full[self.interior_dofs] = self.basis @ reduced
        return full


def build_divfree_subspace(grid: FluidDomainGrid) -> DivergenceFreeSubspace:
    """Null space of the discrete divergence restricted to zero-trace nodal fields."""
    interior = grid.interior_dofs
    div = assembly.divergence(grid)
    dense = div[:, interior].toarray()
    basis = la.null_space(dense)
    if basis.shape[1] == 0:
        raise BasisSizeError(f"the {grid.nx}x{grid.ny} grid has no nonzero discretely divergence-free field")
    rank = interior.size - basis.shape[1]
    logger.info(
        "Divergence-free subspace: %d interior unknowns, divergence rank %d, dimension %d",
        interior.size, rank, basis.shape[1],
    )
    return DivergenceFreeSubspace(
        basis=basis,
        interior_dofs=interior,
        divergence=div,
        n_interior_dofs=int(interior.size),
        divergence_rank=int(rank),
    )


@dataclass(frozen=True, eq=False)
class FluidEigenBasis:
    """First m eigenpairs of a(psi, v) = lambda (psi, v) over discretely divergence-free fields.

    ``modes`` holds full nodal vectors (2 * n_nodes, m), L2-orthonormal and
    zero on the boundary.
    """

    grid: FluidDomainGrid
    eigenvalues: np.ndarray
    modes: np.ndarray
    reduced_modes: np.ndarray
    subspace: DivergenceFreeSubspace
    mass: sp.csr_matrix
    stiffness: sp.csr_matrix
    laplacian: sp.csr_matrix
    nu_f: float
    nu_s: float

    @property
    def m(self) -> int:
        return self.eigenvalues.size

    @property
    def divergence(self) -> sp.csr_matrix:
        return self.subspace.divergence

    def field(self, alpha: np.ndarray) -> np.ndarray:
        return self.modes @ np.asarray(alpha)

    def truncate(self, m: int) -> "FluidEigenBasis":
        if not 1 <= m <= self.m:
            raise BasisSizeError(f"cannot truncate a basis of {self.m} fluid modes to {m}")
        return replace(self, eigenvalues=self.eigenvalues[:m], modes=self.modes[:, :m], reduced_modes=self.reduced_modes[:, :m])

    def gram(self) -> np.ndarray:
        return self.modes.T @ (self.mass @ self.modes)

    def stiffness_gram(self) -> np.ndarray:
        return self.modes.T @ (self.stiffness @ self.modes)

    def orthonormality_error(self) -> float:
        return float(np.abs(self.gram() - np.eye(self.m)).max())

    def a_orthogonality_error(self) -> float:
        """Max off-diagonal |a(psi_i, psi_j)| and max relative diagonal error, whichever is larger."""
        a = self.stiffness_gram()
        off = np.abs(a - np.diag(np.diag(a))).max() if self.m > 1 else 0.0
        diag = np.abs(np.diag(a) - self.eigenvalues).max() / self.eigenvalues.max()
        return float(max(off, diag))

    def residuals(self) -> np.ndarray:
        """||A x - lambda M x|| / ||x|| per pair, measured in the divergence-free coordinates."""
        interior = self.subspace.interior_dofs
        Z = self.subspace.basis
        A = self.stiffness[interior][:, interior]
        M = self.mass[interior][:, interior]
        inner = self.modes[interior]
        out = np.empty(self.m)
        for j in range(self.m):
            r = Z.T @ (A @ inner[:, j] - self.eigenvalues[j] * (M @ inner[:, j]))
            out[j] = np.linalg.norm(r) / np.linalg.norm(self.reduced_modes[:, j])
        return out

    def divergence_norms(self) -> np.ndarray:
        return np.linalg.norm(self.divergence @ self.modes, axis=0)

    def korn_constant(self) -> float:
        """Smallest k with a(u, u) >= k ||grad u||^2 on span(psi_1..psi_m)."""
        G = self.modes.T @ (self.laplacian @ self.modes)
        G = 0.5 * (G + G.T)
        return float(la.eigh(np.diag(self.eigenvalues), G, eigvals_only=True)[0])


def solve_fluid_eigenproblem(
    grid: FluidDomainGrid,
    nu_f: float,
    nu_s: float,
    m: int,
    body: tuple[float, float, float, float] | None = None,
    subspace: DivergenceFreeSubspace | None = None,
) -> FluidEigenBasis:
    """Compute the first m divergence-free eigenpairs of the viscous form.

    The viscosity is frozen at the initial configuration: nu_s on ``body``,
    nu_f elsewhere.

    Raises:
        BasisSizeError: m is not in [1, dim of the divergence-free subspace].
    """
    if nu_f <= 0.0 or nu_s <= 0.0:
        raise ValueError(f"viscosities must be positive, got nu_f={nu_f}, nu_s={nu_s}")
    subspace = subspace or build_divfree_subspace(grid)
    if not 1 <= m <= subspace.dimension:
        raise BasisSizeError(
            f"requested m={m} fluid modes but the divergence-free subspace has dimension {subspace.dimension}"
        )

    if body is None:
        viscosity = np.full(grid.quad_weights.size, nu_f)
    else:
        viscosity = assembly.piecewise_viscosity(grid.quad_points, body, nu_f, nu_s)
    stiffness = assembly.viscous_stiffness(grid, viscosity)
    mass = assembly.vector_mass(grid)

    interior = subspace.interior_dofs
    Z = subspace.basis
    A_r = Z.T @ (stiffness[interior][:, interior] @ Z)
    M_r = Z.T @ (mass[interior][:, interior] @ Z)
    A_r = 0.5 * (A_r + A_r.T)
    M_r = 0.5 * (M_r + M_r.T)

    eigenvalues, vectors = la.eigh(A_r, M_r, subset_by_index=[0, m - 1])
    modes = fix_signs(subspace.embed(vectors, 2 * grid.n_nodes))
    # keep the reduced coordinates consistent with the sign-fixed nodal modes
    reduced = Z.T @ modes[interior]

    logger.info(
        "Fluid eigenbasis: m=%d, lambda_1=%.6g, lambda_m=%.6g (subspace dimension %d)",
        m, eigenvalues[0], eigenvalues[-1], subspace.dimension,
    )
    return FluidEigenBasis(
        grid=grid,
        eigenvalues=eigenvalues,
        modes=modes,
        reduced_modes=reduced,
        subspace=subspace,
        mass=mass,
        stiffness=stiffness,
        laplacian=assembly.vector_laplacian(grid),
        nu_f=float(nu_f),
        nu_s=float(nu_s),
    )
