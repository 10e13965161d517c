import numpy as np
import pytest

from src.app.core.errors import BasisSizeError
from src.app.core.geometry.grids import GeometryConfig, build_grids
from src.app.core.geometry.motion import IdentityMotion
from src.app.core.spectral import assembly
from src.app.core.spectral.fluid import build_divfree_subspace, solve_fluid_eigenproblem
from src.app.core.spectral.solid import solve_solid_eigenproblem


def test_mass_and_stiffness_act_on_constants_and_linears(solid_grid):
    M = assembly.scalar_mass(solid_grid)
    K = assembly.scalar_stiffness(solid_grid)
    ones = np.ones(solid_grid.n_nodes)
    x = solid_grid.nodes[:, 0]
    assert ones @ M @ ones == pytest.approx(solid_grid.measure, rel=1e-12)
    assert np.abs(K @ ones).max() < 1e-10
    # |grad x|^2 integrated over B
    assert x @ K @ x == pytest.approx(solid_grid.measure, rel=1e-12)


def test_divergence_of_linear_field_is_cell_area_times_trace(fluid_grid):
    u = np.empty(2 * fluid_grid.n_nodes)
    u[0::2] = 2.0 * fluid_grid.nodes[:, 0]
    u[1::2] = -0.5 * fluid_grid.nodes[:, 1]
    div = assembly.divergence(fluid_grid) @ u
    assert np.allclose(div, 1.5 * fluid_grid.cell_area, atol=1e-14)


def test_fluid_basis_properties(fluid):
    assert fluid.m == 4
    assert np.all(np.diff(fluid.eigenvalues) >= -1e-12)
    assert fluid.eigenvalues[0] > 0.0
    assert fluid.orthonormality_error() <= 1e-9
    assert fluid.a_orthogonality_error() <= 1e-8
    assert fluid.residuals().max() <= 1e-9
    assert fluid.divergence_norms().max() <= 1e-10
    boundary = fluid.grid.vector_dofs(fluid.grid.boundary_nodes)
    assert np.abs(fluid.modes[boundary]).max() == 0.0
    assert fluid.korn_constant() >= 0.5 - 1e-10


def test_fluid_truncation_keeps_leading_pairs(fluid):
    smaller = fluid.truncate(2)
    assert np.array_equal(smaller.eigenvalues, fluid.eigenvalues[:2])
    assert np.array_equal(smaller.modes, fluid.modes[:, :2])
    with pytest.raises(BasisSizeError):
        fluid.truncate(5)


def test_fluid_basis_is_deterministic(fluid, fluid_grid):
    again = solve_fluid_eigenproblem(fluid_grid, nu_f=1.0, nu_s=1.0, m=4, body=(0.4, 0.6, 0.4, 0.6))
    assert np.allclose(again.modes, fluid.modes, atol=1e-10)


def test_solid_viscosity_raises_eigenvalues(fluid, fluid_grid):
    stiffer = solve_fluid_eigenproblem(fluid_grid, nu_f=1.0, nu_s=10.0, m=4, body=(0.4, 0.6, 0.4, 0.6))
    assert np.all(stiffer.eigenvalues >= fluid.eigenvalues - 1e-10)


def test_too_many_fluid_modes(fluid_grid):
    subspace = build_divfree_subspace(fluid_grid)
    with pytest.raises(BasisSizeError):
        solve_fluid_eigenproblem(fluid_grid, 1.0, 1.0, subspace.dimension + 1, subspace=subspace)


def _reduced_forms(grid, subspace, nu_f=1.0, nu_s=1.0, body=(0.4, 0.6, 0.4, 0.6)):
    viscosity = assembly.piecewise_viscosity(grid.quad_points, body, nu_f, nu_s)
    interior, Z = subspace.interior_dofs, subspace.basis
    A = Z.T @ (assembly.viscous_stiffness(grid, viscosity)[interior][:, interior] @ Z)
    M = Z.T @ (assembly.vector_mass(grid)[interior][:, interior] @ Z)
    return A, M


def test_leading_eigenvalues_match_full_dense_spectrum(fluid, fluid_grid):
    A, M = _reduced_forms(fluid_grid, fluid.subspace)
    spectrum = np.sort(np.linalg.eigvals(np.linalg.solve(M, A)).real)
    assert spectrum[0] > 0.0
    np.testing.assert_allclose(fluid.eigenvalues, spectrum[: fluid.m], rtol=1e-9)


def test_divergence_free_dimension_matches_rank(fluid_grid):
    subspace = build_divfree_subspace(fluid_grid)
    interior = fluid_grid.interior_dofs
    rank = np.linalg.matrix_rank(assembly.divergence(fluid_grid)[:, interior].toarray())
    assert subspace.n_interior_dofs == 2 * (fluid_grid.nx - 2) * (fluid_grid.ny - 2)
    assert subspace.divergence_rank == rank
    # constants pair to zero with every zero-trace field
    assert rank <= fluid_grid.n_cells - 1
    assert subspace.dimension == subspace.n_interior_dofs - rank
    assert np.abs(subspace.basis.T @ subspace.basis - np.eye(subspace.dimension)).max() <= 1e-10


@pytest.mark.parametrize("nu_f,nu_s", [(1.0, 1.0), (1.0, 10.0), (2.0, 0.5)])
def test_korn_constant_is_at_least_half_the_smallest_viscosity(fluid_grid, nu_f, nu_s):
    basis = solve_fluid_eigenproblem(fluid_grid, nu_f=nu_f, nu_s=nu_s, m=4, body=(0.4, 0.6, 0.4, 0.6))
    assert basis.korn_constant() >= 0.5 * min(nu_f, nu_s) - 1e-10


@pytest.mark.slow
def test_first_eigenvalue_is_stable_under_refinement(fluid):
    fine = GeometryConfig(omega=(0.0, 1.0, 0.0, 1.0), body=(0.4, 0.6, 0.4, 0.6), nx=32, ny=32, solid_nx=16, solid_ny=16)
    fine_grid, _ = build_grids(fine, IdentityMotion(final_time=1.0))
    refined = solve_fluid_eigenproblem(fine_grid, nu_f=1.0, nu_s=1.0, m=1, body=(0.4, 0.6, 0.4, 0.6))
    assert abs(refined.eigenvalues[0] - fluid.eigenvalues[0]) <= 0.05 * refined.eigenvalues[0]


def test_solid_basis_is_c_orthonormal(solid):
    assert np.abs(solid.c_gram() - np.eye(solid.R)).max() <= 1e-9
    assert np.abs(solid.l2_gram() - np.diag(solid.c)).max() <= 1e-9
    assert np.abs(solid.gradient_gram() - np.diag(solid.d)).max() <= 1e-9
    assert solid.residuals().max() <= 1e-9
    assert solid.eigenvalues.min() >= 1.0 - 1e-10
    # constant modes first: eigenvalue 1, no gradient
    assert solid.eigenvalues[:2] == pytest.approx([1.0, 1.0], abs=1e-10)
    assert solid.d[:2] == pytest.approx([0.0, 0.0], abs=1e-10)


def test_solid_spectrum_matches_neumann_oracle(solid):
    side = 0.2
    analytic = sorted(
        1.0 + np.pi**2 * (k**2 + l**2) / side**2
        for k in range(5)
        for l in range(5)
        if (k, l) != (0, 0)
    )[:6]
    scalar = solid.eigenvalues[2::2][:6]
    assert np.allclose(solid.eigenvalues[0::2], solid.eigenvalues[1::2])
    assert np.all(np.abs(scalar - analytic) / analytic <= 0.02)


def test_solid_modes_are_componentwise(solid):
    x_modes = solid.modes[:, 0::2]
    y_modes = solid.modes[:, 1::2]
    assert np.abs(x_modes[1::2]).max() == 0.0
    assert np.abs(y_modes[0::2]).max() == 0.0
    assert np.allclose(x_modes[0::2], y_modes[1::2])


def test_solid_projection_recovers_modes(solid):
    beta = np.arange(1.0, 7.0)
    assert np.allclose(solid.project(solid.field(beta), 6), beta, atol=1e-9)


def test_solid_size_limits(solid_grid, solid):
    with pytest.raises(BasisSizeError):
        solve_solid_eigenproblem(solid_grid, 0)
    with pytest.raises(BasisSizeError):
        solid.truncate(solid.R + 1)
    odd = solve_solid_eigenproblem(solid_grid, 5)
    assert odd.R == 5
