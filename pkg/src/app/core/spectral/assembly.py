"""Q1 finite element assembly on uniform rectangular grids.

All cells of a grid are translates of one another, so shape-function values
and gradients at the reference quadrature points are shared; only the
viscosity may vary per quadrature point. Global matrices are assembled in
COO form and converted to CSR (duplicates are summed).
"""

import numpy as np
import scipy.sparse as sp

from ..geometry.grids import RectGrid
from ..geometry.quadrature import gauss_rule, q1_derivatives, q1_values

_SQRT_HALF = np.sqrt(0.5)


def reference_shape(grid: RectGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Shape values, x/y gradients (each (nq, 4)) and physical weights (nq,) of one cell."""
    points, weights = gauss_rule(grid.quadrature_order)
    values = q1_values(points[:, 0], points[:, 1])
    dxi, deta = q1_derivatives(points[:, 0], points[:, 1])
    return values, dxi / grid.hx, deta / grid.hy, weights * grid.cell_area


def _assemble(grid: RectGrid, element: np.ndarray, dofs: np.ndarray, size: int) -> sp.csr_matrix:
    # element: (n_cells, k, k) or (k, k); dofs: (n_cells, k)
    k = dofs.shape[1]
    data = np.broadcast_to(element, (grid.n_cells, k, k))
    rows = np.broadcast_to(dofs[:, :, None], data.shape)
    cols = np.broadcast_to(dofs[:, None, :], data.shape)
    return sp.coo_matrix((data.ravel(), (rows.ravel(), cols.ravel())), shape=(size, size)).tocsr()


def _vector_cell_dofs(grid: RectGrid) -> np.ndarray:
    return np.stack([2 * grid.cells, 2 * grid.cells + 1], axis=-1).reshape(grid.n_cells, 8)


def scalar_mass(grid: RectGrid) -> sp.csr_matrix:
    values, _, _, weights = reference_shape(grid)
    element = np.einsum("q,qa,qb->ab", weights, values, values)
    return _assemble(grid, element, grid.cells, grid.n_nodes)


def scalar_stiffness(grid: RectGrid) -> sp.csr_matrix:
    _, dx, dy, weights = reference_shape(grid)
    element = np.einsum("q,qa,qb->ab", weights, dx, dx) + np.einsum("q,qa,qb->ab", weights, dy, dy)
    return _assemble(grid, element, grid.cells, grid.n_nodes)


def vector_mass(grid: RectGrid) -> sp.csr_matrix:
    """L2 Gram matrix of interleaved vector fields."""
    return sp.kron(scalar_mass(grid), sp.identity(2), format="csr")


def vector_laplacian(grid: RectGrid) -> sp.csr_matrix:
    """Componentwise (grad u, grad v) on interleaved vector fields."""
    return sp.kron(scalar_stiffness(grid), sp.identity(2), format="csr")


def strain_matrices(grid: RectGrid) -> np.ndarray:
    """Voigt strain operator per quadrature point, shape (nq, 3, 8).

    Rows are (eps_xx, eps_yy, sqrt(2) eps_xy), so the Euclidean product of two
    rows equals eps(u):eps(v).
    """
    _, dx, dy, _ = reference_shape(grid)
    nq = dx.shape[0]
    strain = np.zeros((nq, 3, 8))
    strain[:, 0, 0::2] = dx
    strain[:, 1, 1::2] = dy
    strain[:, 2, 0::2] = _SQRT_HALF * dy
    strain[:, 2, 1::2] = _SQRT_HALF * dx
    return strain


def viscous_stiffness(grid: RectGrid, viscosity: np.ndarray) -> sp.csr_matrix:
    """Assemble a(u, v) = (nu eps(u), eps(v)) with nu sampled at the grid's quadrature points.

    Args:
        grid: Grid whose ``quad_points`` ordering (cell-major) matches ``viscosity``.
        viscosity: Values of nu, shape (n_cells * nq,).
    """
    _, _, _, weights = reference_shape(grid)
    strain = strain_matrices(grid)
    nu = np.asarray(viscosity, dtype=float).reshape(grid.n_cells, weights.size)
    element = np.einsum("q,cq,qia,qib->cab", weights, nu, strain, strain)
    return _assemble(grid, element, _vector_cell_dofs(grid), 2 * grid.n_nodes)


def divergence(grid: RectGrid) -> sp.csr_matrix:
    """Pairing of div v with piecewise constants: row c holds the integral of div v over cell c."""
    _, dx, dy, weights = reference_shape(grid)
    local = np.empty(8)
    local[0::2] = weights @ dx
    local[1::2] = weights @ dy
    dofs = _vector_cell_dofs(grid)
    rows = np.repeat(np.arange(grid.n_cells), 8)
    data = np.tile(local, grid.n_cells)
    return sp.coo_matrix((data, (rows, dofs.ravel())), shape=(grid.n_cells, 2 * grid.n_nodes)).tocsr()


def cell_mass(grid: RectGrid) -> sp.dia_matrix:
    """Gram matrix of the piecewise-constant (cell indicator) space."""
    return sp.diags(np.full(grid.n_cells, grid.cell_area))


def piecewise_viscosity(points: np.ndarray, body: tuple[float, float, float, float], nu_f: float, nu_s: float) -> np.ndarray:
    """nu_s inside the reference body, nu_f elsewhere."""
    x0, x1, y0, y1 = body
    inside = (points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1)
    return np.where(inside, nu_s, nu_f)
