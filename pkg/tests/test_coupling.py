import numpy as np
import pytest

from src.app.core.coupling.compose import compose_field, composition_operator
from src.app.core.coupling.matrices import (
    CouplingContext,
    assemble_matrices,
    compute_delta,
    delta_direct,
    tail_size,
)
from src.app.core.errors import ContainmentError
from src.app.core.geometry.motion import IdentityMotion, RotationMotion, ShearMotion, TranslationMotion

MOVING = [
    TranslationMotion(final_time=1.0, amplitude=(0.05, 0.0), frequency=1.0),
    RotationMotion(final_time=1.0, angular_velocity=1.0),
    ShearMotion(final_time=1.0, rate=0.1),
]


def test_compose_linear_field_is_exact(fluid_grid, solid_grid):
    values = np.empty(2 * fluid_grid.n_nodes)
    values[0::2] = fluid_grid.nodes[:, 0] + 2.0 * fluid_grid.nodes[:, 1]
    values[1::2] = -fluid_grid.nodes[:, 0]
    motion = RotationMotion(final_time=1.0, angular_velocity=2.0)
    samples = compose_field(values, fluid_grid, motion, 0.6, solid_grid.quad_points)
    mapped = motion.position(solid_grid.quad_points, 0.6)
    assert samples.shape == (solid_grid.quad_points.shape[0], 2)
    assert np.allclose(samples[:, 0], mapped[:, 0] + 2.0 * mapped[:, 1], atol=1e-12)
    assert np.allclose(samples[:, 1], -mapped[:, 0], atol=1e-12)


def test_compose_stack_of_fields(fluid, solid_grid):
    samples = compose_field(fluid.modes, fluid.grid, IdentityMotion(), 0.0, solid_grid.nodes)
    assert samples.shape == (solid_grid.n_nodes, 2, fluid.m)


def test_mapped_point_outside_box_raises(fluid_grid):
    motion = TranslationMotion(final_time=1.0, amplitude=(2.0, 0.0), frequency=1.0)
    with pytest.raises(ContainmentError) as excinfo:
        composition_operator(fluid_grid, motion, 1.0, np.array([[0.5, 0.5]]))
    assert excinfo.value.point == (0.5, 0.5)
    assert excinfo.value.time == 1.0


def test_delta_agrees_with_assembled_c_form(fluid, solid):
    for motion in [IdentityMotion(final_time=1.0), *MOVING]:
        coeffs = compute_delta(0.3, fluid, solid, motion)
        direct = delta_direct(coeffs, solid)
        scale = np.abs(coeffs.delta).max()
        assert np.abs(coeffs.delta - direct).max() <= 1e-9 * scale


@pytest.mark.parametrize("motion", MOVING, ids=lambda m: m.kind)
def test_c_is_symmetric_positive_semidefinite(fluid, solid, motion):
    context = CouplingContext(fluid, solid, motion)
    for t in np.linspace(0.0, 1.0, 20):
        matrices = context.at(t)
        assert np.array_equal(matrices.C, matrices.C.T)
        assert np.linalg.eigvalsh(matrices.C)[0] >= -1e-10
        assert matrices.asymmetry <= 1e-12 * max(1.0, np.abs(matrices.C).max())


def test_identity_motion_is_constant(fluid, solid):
    context = CouplingContext(fluid, solid, IdentityMotion(final_time=1.0))
    assert context.constant
    first, later = context.at(0.0), context.at(0.7)
    assert later.time == 0.7
    assert np.array_equal(first.C, later.C)
    assert np.abs(later.D).max() == 0.0
    assert np.abs(later.coefficients.delta_rate).max() == 0.0


def test_matrix_shapes_and_relations(fluid, solid):
    matrices = CouplingContext(fluid, solid, MOVING[1]).at(0.25)
    delta = matrices.coefficients.delta
    m = fluid.m
    assert matrices.B.shape == matrices.C.shape == matrices.D.shape == matrices.E.shape == (m, m)
    assert np.array_equal(matrices.B, delta[:, :m])
    assert np.allclose(matrices.E, delta[:, :m] * solid.d[:m])
    assert np.allclose(matrices.C, (delta * solid.c) @ delta.T)
    assert 0.0 <= matrices.tail <= 1.0


def test_tail_is_last_decile():
    assert tail_size(16) == 2
    assert tail_size(32) == 4
    assert tail_size(5) == 1


def test_delta_rate_matches_central_differences(fluid, solid):
    # positions stay h/10 away from fluid cell edges over the stencil
    motion = TranslationMotion(final_time=1.0, amplitude=(0.05, 0.0), frequency=1.0)
    h_cell = fluid.grid.hx
    t = float(np.arcsin(h_cell / 10.0 / 0.05))
    exact = compute_delta(t, fluid, solid, motion).delta_rate
    errors = []
    for tau in (1e-2, 5e-3):
        plus = compute_delta(t + tau, fluid, solid, motion).delta
        minus = compute_delta(t - tau, fluid, solid, motion).delta
        errors.append(np.abs((plus - minus) / (2 * tau) - exact).max())
    assert errors[1] <= 1e-3 * np.abs(exact).max()
    assert np.log2(errors[0] / errors[1]) >= 1.9


def test_context_requires_enough_solid_modes(fluid, solid):
    with pytest.raises(ValueError):
        CouplingContext(fluid, solid.truncate(fluid.m - 1), IdentityMotion())


def test_symmetrization_warning(fluid, solid, caplog):
    coeffs = compute_delta(0.0, fluid, solid, IdentityMotion())
    with caplog.at_level("WARNING"):
        assemble_matrices(coeffs, solid, symmetry_warn_tol=-1.0)
    assert "asymmetric" in caplog.text
