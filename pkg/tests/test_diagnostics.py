from dataclasses import replace

import numpy as np
import pytest

from src.app.core.config import Settings
from src.app.core.coupling.matrices import CouplingContext
from src.app.core.diagnostics.checks import (
    build_report,
    constraint_residual,
    constraint_residuals,
    difference_decay,
    kinematic_drift,
    parseval_gaps,
)
from src.app.core.diagnostics.convergence import cauchy_table, self_convergence_table, series_tail
from src.app.core.diagnostics.energy import energy, energy_excess, max_relative_step_drift
from src.app.core.errors import ScenarioMismatchError
from src.app.core.evolution.integrator import integrate, ode_rhs
from src.app.core.evolution.state import InitialData, PhysicalParams, project_initial_data
from src.app.core.geometry.motion import IdentityMotion, RotationMotion, verify_assumption
from src.app.core.recovery.fields import recover_frame
from src.app.core.recovery.pressure import PressureSolver


def test_energy_never_exceeds_initial(identity_run, rotation_run, heavy_rotation_run):
    for _, trajectory in (identity_run, rotation_run, heavy_rotation_run):
        records = energy(trajectory)
        assert len(records) == len(trajectory.frames)
        assert energy_excess(records) <= 1e-8
        assert records[-1].total < records[0].total
        assert records[-1].dissipation > 0.0


def test_heavy_body_activates_inertial_coupling(heavy_rotation_run):
    context, trajectory = heavy_rotation_run
    params = trajectory.params
    assert params.delta_rho == 4.0
    frame = trajectory.frames[3]
    assert np.abs(frame.matrices.D).max() > 1e-6
    records = energy(trajectory)
    assert max(abs(r.excess) for r in records) > 0.0

    # mass @ alpha' balances -(Lambda + drho D) alpha - kappa E beta
    alpha_rate, beta_rate = ode_rhs(frame.t, frame.state, params, frame.matrices, context.fluid.eigenvalues)
    mass = params.rho_f * np.eye(frame.state.m) + params.delta_rho * frame.matrices.C
    force = (
        context.fluid.eigenvalues * frame.state.alpha
        + params.delta_rho * frame.matrices.D @ frame.state.alpha
        + params.kappa * frame.matrices.E @ frame.state.beta
    )
    np.testing.assert_allclose(mass @ alpha_rate, -force, rtol=1e-10, atol=1e-12 * np.abs(force).max())
    np.testing.assert_allclose(beta_rate, frame.matrices.B.T @ frame.state.alpha, rtol=1e-14)


def test_energy_terms_add_up(identity_run):
    records = energy(identity_run[1])
    for record in records:
        assert record.total == pytest.approx(record.kinetic + record.excess + record.elastic, rel=1e-14)
        assert record.initial == records[0].total
    # trapezoid on output times tracks the per-step dissipation
    assert records[-1].dissipation_trapezoid == pytest.approx(records[-1].dissipation, rel=0.2)


def test_zero_data_stays_exactly_at_rest(fluid, solid, identity_motion):
    params = PhysicalParams(rho_s=2.0, elastic_reference="initial")
    context = CouplingContext(fluid, solid, identity_motion)
    initial = project_initial_data(InitialData.zero(fluid, solid), fluid, solid, identity_motion)
    trajectory = integrate(initial, context, params, 1e-3, 0.1, 0.02, beta_ref=initial.beta)
    assert not trajectory.alphas.any()
    assert np.array_equal(trajectory.betas, np.tile(initial.beta, (len(trajectory.frames), 1)))
    records = energy(trajectory)
    assert all(r.total == 0.0 for r in records)
    assert all(r.dissipation == 0.0 for r in records)
    assert max_relative_step_drift(trajectory) == 0.0


def test_step_drift_is_relative_to_the_energy(identity_run):
    _, trajectory = identity_run
    drift = max_relative_step_drift(trajectory)
    assert 0.0 <= drift <= 1e-10
    scaled = replace(trajectory, step_drift=[1e-3 * e for e in trajectory.step_energy[:-1]])
    assert max_relative_step_drift(scaled) == pytest.approx(1e-3, rel=1e-12)


def test_constraint_residual_and_negative_controls(identity_run, rotation_run):
    for context, trajectory in (identity_run, rotation_run):
        assert constraint_residual(trajectory, context) <= 1e-9
        assert constraint_residuals(trajectory, context).shape == (len(trajectory.frames),)

    context, trajectory = identity_run
    frame = trajectory.frames[1]
    nudged_alpha = frame.state.alpha.copy()
    nudged_alpha[0] += 1e-3
    broken = replace(frame, state=replace(frame.state, alpha=nudged_alpha))
    perturbed = replace(trajectory, frames=[trajectory.frames[0], broken])
    assert constraint_residual(perturbed, context) >= 1e-5

    # solid velocity built from wrong composed modes, consistently with the stored coefficients
    coefficients = frame.matrices.coefficients
    skewed = replace(coefficients, composed=1.01 * coefficients.composed)
    inconsistent = replace(
        frame,
        matrices=replace(frame.matrices, coefficients=skewed),
        solid_velocity=skewed.composed @ frame.state.alpha,
    )
    perturbed = replace(trajectory, frames=[trajectory.frames[0], inconsistent])
    assert constraint_residual(perturbed, context) >= 1e-6


def test_kinematic_drift_is_small(identity_run, rotation_run, solid):
    assert kinematic_drift(identity_run[1], solid) <= 1e-6
    assert kinematic_drift(rotation_run[1], solid) <= 1e-6


def test_difference_of_identical_runs_vanishes(fluid, solid, identity_run, mode_state, identity_motion):
    context, trajectory = identity_run
    again = integrate(mode_state(fluid, solid, identity_motion), context, trajectory.params, 1e-3, 0.1, 0.01)
    report = difference_decay(trajectory, again)
    assert report.identical_initial
    assert report.max_coefficient_gap <= 1e-12
    assert report.passed


def test_difference_energy_decays(fluid, solid, identity_run, mode_state, identity_motion):
    context, trajectory = identity_run
    other = integrate(mode_state(fluid, solid, identity_motion, amplitude=1.5), context, trajectory.params, 1e-3, 0.1, 0.01)
    report = difference_decay(trajectory, other)
    assert not report.identical_initial
    assert report.max_increase <= 1e-8
    assert report.energies[-1] < report.energies[0]
    assert report.passed


def test_difference_requires_same_scenario(fluid, solid, identity_run, mode_state, identity_motion):
    context, trajectory = identity_run
    coarse = integrate(mode_state(fluid, solid, identity_motion), context, trajectory.params, 1e-3, 0.1, 0.02)
    with pytest.raises(ScenarioMismatchError):
        difference_decay(trajectory, coarse)
    heavier = integrate(mode_state(fluid, solid, identity_motion), context, PhysicalParams(rho_s=5.0), 1e-3, 0.1, 0.01)
    with pytest.raises(ScenarioMismatchError):
        difference_decay(trajectory, heavier)


def test_series_tail_saturates(fluid, solid):
    motion = RotationMotion(final_time=1.0, angular_velocity=1.0)
    rows = series_tail(0, [4, 8, 24], fluid, solid, motion, [0.0, 0.5])
    assert [row.R for row in rows] == [4, 8, 24, 4, 8, 24]
    for t in (0.0, 0.5):
        sums = [row.weighted_sum for row in rows if row.t == t]
        assert sums == sorted(sums)
        last = next(row for row in rows if row.t == t and row.R == 24)
        assert abs(last.gap) <= 1e-2
    assert all(row.gap >= -1e-10 for row in rows if row.t == 0.0)
    with pytest.raises(ValueError):
        series_tail(0, [solid.R + 1], fluid, solid, motion, [0.0])


def test_series_tail_rate_vanishes_for_fixed_body(fluid, solid):
    rows = series_tail(1, [8, 16], fluid, solid, IdentityMotion(), [0.3])
    assert all(row.rate_sum == 0.0 for row in rows)


def test_parseval_gaps_are_small(rotation_run, solid):
    gaps = parseval_gaps(rotation_run[1], solid)
    assert gaps.shape == (11,)
    assert gaps.min() >= -1e-10
    assert gaps.max() <= 1e-2


def test_cauchy_table_pads_coarse_states():
    d = np.array([0.0, 0.0, 4.0, 4.0])
    terminal = {
        2: (np.array([1.0, 0.0]), np.array([0.5, 0.5])),
        4: (np.array([1.0, 0.0, 0.3, 0.4]), np.array([0.5, 0.5, 0.0, 0.5])),
    }
    (row,) = cauchy_table(terminal, d)
    assert (row.m_coarse, row.m_fine) == (2, 4)
    assert row.fluid_difference == pytest.approx(0.5)
    assert row.elastic_difference == pytest.approx(1.0)


def test_self_convergence_ratios():
    exact = np.array([1.0, -2.0])
    terminal = {dt: exact + dt**2 * np.array([3.0, 1.0]) for dt in (0.04, 0.02, 0.01)}
    rows = self_convergence_table(terminal)
    assert [row.dt_coarse for row in rows] == [0.04, 0.02]
    assert rows[0].ratio is None
    assert rows[1].ratio == pytest.approx(4.0, rel=1e-9)


def test_report_of_fixed_body_run_passes(identity_run, fluid_grid):
    context, trajectory = identity_run
    solver = PressureSolver(context.fluid)
    recoveries = [recover_frame(f, context, trajectory.params, solver) for f in trajectory.frames]
    assumption = verify_assumption(context.motion, context.solid.grid, fluid_grid, np.linspace(0.0, 0.1, 5))
    report = build_report(
        scenario="identity",
        scenario_hash="abc",
        context=context,
        trajectory=trajectory,
        energy_records=energy(trajectory),
        recoveries=recoveries,
        assumption=assumption,
        settings=Settings(),
    )
    assert report.passed, report.first_failure
    names = [check.name for check in report.checks]
    assert "energy_step_identity" in names
    assert "pressure_divfree_residual" in names
    payload = report.to_payload()
    assert payload["passed"] is True
    assert payload["scenario_hash"] == "abc"


def test_report_flags_the_first_failing_check(rotation_run, fluid_grid):
    context, trajectory = rotation_run
    assumption = verify_assumption(context.motion, context.solid.grid, fluid_grid, np.linspace(0.0, 0.1, 5))
    strict = Settings(constraint_tol=-1.0)
    report = build_report(
        scenario="rotation",
        scenario_hash="abc",
        context=context,
        trajectory=trajectory,
        energy_records=energy(trajectory),
        recoveries=[],
        assumption=assumption,
        settings=strict,
    )
    assert not report.passed
    assert report.first_failure.name == "constraint"
    assert "split_residual" not in [check.name for check in report.checks]
