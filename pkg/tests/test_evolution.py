import numpy as np
import pytest
import scipy.linalg as la

from src.app.core.coupling.matrices import CouplingContext
from src.app.core.diagnostics.energy import max_relative_step_drift
from src.app.core.errors import IncompatibleInitialDataError, SingularMassError
from src.app.core.evolution.integrator import check_mass, integrate, midpoint_update, ode_rhs, step, step_count
from src.app.core.evolution.state import (
    GalerkinState,
    InitialData,
    PhysicalParams,
    elastic_reference,
    project_initial_data,
)
from src.app.core.geometry.motion import IdentityMotion


def test_identity_motion_matches_matrix_exponential(fluid, solid, mode_state):
    motion = IdentityMotion(final_time=0.1)
    params = PhysicalParams(rho_f=1.0, rho_s=2.0, nu_f=1.0, nu_s=1.0, kappa=1.0)
    context = CouplingContext(fluid, solid, motion)
    initial = mode_state(fluid, solid, motion)
    trajectory = integrate(initial, context, params, dt=1e-4, final_time=0.1, dt_out=0.1)

    matrices = context.at(0.0)
    mass = params.rho_f * np.eye(fluid.m) + params.delta_rho * matrices.C
    inv = np.linalg.inv(mass)
    system = np.block([
        [-inv @ np.diag(fluid.eigenvalues), -params.kappa * inv @ matrices.E],
        [matrices.B.T, np.zeros((fluid.m, fluid.m))],
    ])
    expected = la.expm(0.1 * system) @ initial.vector()
    computed = trajectory.final.vector()
    assert np.linalg.norm(computed - expected) <= 1e-6 * np.linalg.norm(expected)


def test_zero_data_with_initial_reference_stays_at_rest(fluid, solid, identity_motion):
    params = PhysicalParams(rho_s=2.0, elastic_reference="initial")
    context = CouplingContext(fluid, solid, identity_motion)
    initial = project_initial_data(InitialData.zero(fluid, solid), fluid, solid, identity_motion)
    beta_ref = elastic_reference(params, solid, fluid.m)
    assert np.array_equal(beta_ref, initial.beta)

    trajectory = integrate(initial, context, params, dt=1e-3, final_time=0.1, dt_out=0.05, beta_ref=beta_ref)
    assert not trajectory.alphas.any()
    assert np.array_equal(trajectory.betas, np.tile(beta_ref, (3, 1)))
    assert all(e == 0.0 for e in trajectory.step_energy)
    assert all(r == 0.0 for r in trajectory.step_drift)
    assert max_relative_step_drift(trajectory) == 0.0


def test_rest_state_is_a_fixed_point_of_the_step(fluid, solid, rotation_motion):
    params = PhysicalParams(rho_f=1.0, rho_s=5.0, kappa=3.0)
    context = CouplingContext(fluid, solid, rotation_motion)
    beta_ref = np.linspace(0.5, 2.0, fluid.m)
    rest = GalerkinState(t=0.0, alpha=np.zeros(fluid.m), beta=beta_ref.copy())
    advanced = step(rest, 1e-3, params, context, beta_ref=beta_ref)
    assert not advanced.alpha.any()
    assert np.array_equal(advanced.beta, beta_ref)

    matrices = context.at(0.05)
    moved = midpoint_update(rest, 0.1, params, matrices, fluid.eigenvalues, beta_ref)
    assert not moved.alpha.any()
    assert np.array_equal(moved.beta, beta_ref)


def test_origin_reference_is_zero(solid):
    assert np.array_equal(elastic_reference(PhysicalParams(), solid, 4), np.zeros(4))


def test_energy_step_identity_is_exact_for_fixed_body(identity_run):
    _, trajectory = identity_run
    assert len(trajectory.step_drift) == 100
    assert max_relative_step_drift(trajectory) <= 1e-10


def test_energy_step_identity_with_matched_densities(rotation_run):
    _, trajectory = rotation_run
    assert max_relative_step_drift(trajectory) <= 1e-10


def test_frames_are_stored_at_output_times(identity_run):
    _, trajectory = identity_run
    assert len(trajectory.frames) == 11
    assert np.allclose(trajectory.times, np.linspace(0.0, 0.1, 11), atol=1e-14)
    assert [frame.step for frame in trajectory.frames] == list(range(0, 101, 10))


def test_single_step_matches_integrator(fluid, solid, rotation_motion, mode_state):
    params = PhysicalParams(rho_s=1.0)
    context = CouplingContext(fluid, solid, rotation_motion)
    initial = mode_state(fluid, solid, rotation_motion)
    stepped = step(initial, 1e-3, params, context)
    integrated = integrate(initial, context, params, dt=1e-3, final_time=1e-3, dt_out=1e-3).final
    assert stepped.t == pytest.approx(integrated.t, abs=1e-15)
    assert np.allclose(stepped.alpha, integrated.alpha, rtol=0.0, atol=1e-14)
    assert np.allclose(stepped.beta, integrated.beta, rtol=0.0, atol=1e-14)
    with pytest.raises(ValueError):
        step(initial, 0.0, params, context)


def test_rhs_solves_corrected_momentum(fluid, solid, identity_motion, mode_state):
    params = PhysicalParams(rho_f=1.0, rho_s=3.0, kappa=2.0)
    context = CouplingContext(fluid, solid, identity_motion)
    state = mode_state(fluid, solid, identity_motion)
    matrices = context.at(0.0)
    alpha_rate, beta_rate = ode_rhs(0.0, state, params, matrices, fluid.eigenvalues)
    mass = params.rho_f * np.eye(fluid.m) + params.delta_rho * matrices.C
    force = fluid.eigenvalues * state.alpha + params.kappa * matrices.E @ state.beta
    assert np.allclose(mass @ alpha_rate, -force, atol=1e-10)
    assert np.allclose(beta_rate, matrices.B.T @ state.alpha)


def test_singular_mass_is_reported():
    with pytest.raises(SingularMassError) as excinfo:
        check_mass(np.diag([1.0, -0.5]), 0.25, eps=1e-10)
    assert excinfo.value.time == 0.25
    assert excinfo.value.min_eigenvalue == pytest.approx(-0.5)
    assert check_mass(np.eye(3), 0.0, eps=1e-10) == pytest.approx(1.0)


def test_light_solid_keeps_mass_definite(fluid, solid, identity_motion):
    C = CouplingContext(fluid, solid, identity_motion).at(0.0).C
    eigenvalues = np.linalg.eigvalsh(C)
    assert eigenvalues[-1] <= 1.0 + 1e-10
    params = PhysicalParams(rho_f=1.0, rho_s=0.01)
    mass = params.rho_f * np.eye(fluid.m) + params.delta_rho * C
    assert check_mass(mass, 0.0) >= params.rho_s - 1e-10


def test_incompatible_initial_data_is_rejected(fluid, solid, identity_motion):
    uniform = np.zeros(2 * fluid.grid.n_nodes)
    uniform[0::2] = 1.0
    data = InitialData(u0=uniform, us0=np.zeros(2 * solid.grid.n_nodes))
    with pytest.raises(IncompatibleInitialDataError, match="divergence-free"):
        project_initial_data(data, fluid, solid, identity_motion)

    good = InitialData.from_fluid_field(fluid.modes[:, 0], fluid, solid, identity_motion)
    shifted = InitialData(u0=good.u0, us0=good.us0 + 0.1)
    with pytest.raises(IncompatibleInitialDataError, match="equal the fluid velocity"):
        project_initial_data(shifted, fluid, solid, identity_motion)


def test_projection_of_first_mode(fluid, solid, identity_motion, mode_state):
    state = mode_state(fluid, solid, identity_motion, amplitude=2.0)
    expected = np.zeros(fluid.m)
    expected[0] = 2.0
    assert np.allclose(state.alpha, expected, atol=1e-9)
    assert state.t == 0.0


def test_state_rejects_bad_coefficients():
    with pytest.raises(ValueError):
        GalerkinState(t=0.0, alpha=np.array([1.0, np.nan]), beta=np.zeros(2))
    with pytest.raises(ValueError):
        GalerkinState(t=0.0, alpha=np.zeros(3), beta=np.zeros(2))


def test_step_counts():
    assert step_count(0.1, 1e-3) == 100
    with pytest.raises(ValueError, match="integer multiple"):
        step_count(0.1, 0.03)


def test_output_interval_must_divide_run(identity_run, mode_state, fluid, solid, identity_motion):
    context, _ = identity_run
    initial = mode_state(fluid, solid, identity_motion)
    with pytest.raises(ValueError, match="does not divide"):
        integrate(initial, context, PhysicalParams(), dt=1e-3, final_time=0.1, dt_out=0.03)
