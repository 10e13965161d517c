"""Property checks on computed trajectories and the verification report."""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel
from scipy.integrate import trapezoid

from .energy import EnergyRecord, energy_excess, max_relative_step_drift
from ..config import Settings
from ..coupling.compose import compose_field
from ..coupling.matrices import CouplingContext
from ..errors import ScenarioMismatchError
from ..evolution.integrator import Trajectory
from ..evolution.state import galerkin_energy
from ..geometry.motion import AssumptionReport
from ..recovery.fields import RecoveryFields
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis

logger = logging.getLogger(__name__)


class Check(BaseModel):
    name: str
    passed: bool
    measured: float
    threshold: float | None = None


class VerificationReport(BaseModel):
    scenario: str
    scenario_hash: str
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def first_failure(self) -> Check | None:
        return next((check for check in self.checks if not check.passed), None)

    def to_payload(self) -> dict:
        return {
            "scenario": self.scenario,
            "scenario_hash": self.scenario_hash,
            "passed": self.passed,
            "checks": [check.model_dump() for check in self.checks],
        }


def at_most(name: str, measured: float, threshold: float) -> Check:
    return Check(name=name, passed=bool(np.isfinite(measured) and measured <= threshold), measured=float(measured), threshold=threshold)


def at_least(name: str, measured: float, threshold: float) -> Check:
    return Check(name=name, passed=bool(np.isfinite(measured) and measured >= threshold), measured=float(measured), threshold=threshold)


def reported(name: str, measured: float) -> Check:
    """A quantity that is recorded without a pass/fail threshold."""
    return Check(name=name, passed=bool(np.isfinite(measured)), measured=float(measured), threshold=None)


def constraint_residuals(trajectory: Trajectory, context: CouplingContext) -> np.ndarray:
    """Per frame, max_i |c(phi_i(t), u^m o X(t) - w^m(t))|.

    u^m o X is sampled afresh from the fluid field at the mapped solid nodes,
    independently of the stored coupling coefficients and solid velocity.
    """
    fluid, solid = context.fluid, context.solid
    c_form = solid.c_form
    out = np.empty(len(trajectory.frames))
    for k, frame in enumerate(trajectory.frames):
        samples = compose_field(fluid.field(frame.state.alpha), fluid.grid, context.motion, frame.t, solid.grid.nodes)
        gap = samples.ravel() - frame.solid_velocity
        composed = frame.matrices.coefficients.composed
        out[k] = float(np.abs(composed.T @ (c_form @ gap)).max(initial=0.0))
    return out


def constraint_residual(trajectory: Trajectory, context: CouplingContext) -> float:
    return float(constraint_residuals(trajectory, context).max(initial=0.0))


def kinematic_drift(trajectory: Trajectory, solid: SolidEigenBasis) -> float:
    """max_t ||X^m(t) - X0^m - P_m int_0^t w^m||_{0,B} with P_m the projection on chi_1..chi_m."""
    beta0 = trajectory.frames[0].state.beta
    c = solid.c[: beta0.size]
    worst = 0.0
    for frame in trajectory.frames:
        gap = frame.state.beta - beta0 - frame.kinematic
        worst = max(worst, float(np.sqrt(np.sum(c * gap**2))))
    return worst


def mass_psd_margin(trajectory: Trajectory) -> tuple[float, float]:
    """(min eigenvalue of C, min eigenvalue of rho_f I + drho C - rho_f) over frames."""
    params = trajectory.params
    smallest_c = np.inf
    smallest_shift = np.inf
    for frame in trajectory.frames:
        eig_c = float(np.linalg.eigvalsh(frame.matrices.C)[0])
        smallest_c = min(smallest_c, eig_c)
        mass = params.rho_f * np.eye(frame.matrices.C.shape[0]) + params.delta_rho * frame.matrices.C
        smallest_shift = min(smallest_shift, float(np.linalg.eigvalsh(mass)[0]) - params.rho_f)
    return float(smallest_c), float(smallest_shift)


def a_priori_ratios(trajectory: Trajectory, fluid: FluidEigenBasis, solid: SolidEigenBasis) -> dict[str, float]:
    """Ratios of the four energy-estimate norms to ||u0^m|| + ||us0^m||_B + |B|^(1/2)."""
    gradient_gram = fluid.modes.T @ (fluid.laplacian @ fluid.modes)
    mass_s = solid.mass
    times = trajectory.times

    u_sup = max(float(np.linalg.norm(f.state.alpha)) for f in trajectory.frames)
    rates = np.array([float(f.state.alpha @ gradient_gram @ f.state.alpha) for f in trajectory.frames])
    u_h1 = float(np.sqrt(max(trapezoid(rates, times), 0.0))) if times.size > 1 else 0.0
    w_sup = max(float(np.sqrt(max(f.solid_velocity @ (mass_s @ f.solid_velocity), 0.0))) for f in trajectory.frames)
    x_sup = max(float(np.linalg.norm(f.state.beta)) for f in trajectory.frames)

    first = trajectory.frames[0]
    w0 = float(np.sqrt(max(first.solid_velocity @ (mass_s @ first.solid_velocity), 0.0)))
    data = float(np.linalg.norm(first.state.alpha)) + w0 + float(np.sqrt(solid.grid.measure))
    return {
        "u_linf_l2": u_sup / data,
        "u_l2_h1": u_h1 / data,
        "w_linf_l2": w_sup / data,
        "x_linf_h1": x_sup / data,
    }


class DifferenceReport(BaseModel):
    """Energy of the difference of two trajectories of one scenario."""

    times: list[float]
    energies: list[float]
    max_increase: float
    max_coefficient_gap: float
    identical_initial: bool
    passed: bool


def _same_scenario(a: Trajectory, b: Trajectory) -> None:
    if len(a.frames) != len(b.frames) or not np.array_equal(a.times, b.times):
        raise ScenarioMismatchError("trajectories have different output times")
    if a.dt != b.dt or a.params != b.params:
        raise ScenarioMismatchError("trajectories use different time steps or physical parameters")
    if a.frames[0].state.m != b.frames[0].state.m or not np.array_equal(a.beta_ref, b.beta_ref):
        raise ScenarioMismatchError("trajectories use different bases or elastic references")


def difference_decay(
    a: Trajectory,
    b: Trajectory,
    tol: float = 1e-8,
    identical_tol: float = 1e-12,
) -> DifferenceReport:
    """Difference energy rho_f|a|^2 + drho a^T C a + kappa sum d b^2 of two runs.

    Raises:
        ScenarioMismatchError: the trajectories do not come from the same scenario.
    """
    _same_scenario(a, b)
    params = a.params
    zero = np.zeros(a.frames[0].state.m)
    energies = []
    gap = 0.0
    for fa, fb in zip(a.frames, b.frames):
        da = fa.state.alpha - fb.state.alpha
        db = fa.state.beta - fb.state.beta
        gap = max(gap, float(np.abs(da).max(initial=0.0)), float(np.abs(db).max(initial=0.0)))
        energies.append(sum(galerkin_energy(da, db, fa.matrices.C, a.elastic_weights, params, zero)))
    increase = float(np.max(np.diff(energies), initial=0.0))
    first_a, first_b = a.frames[0].state, b.frames[0].state
    identical = bool(np.array_equal(first_a.alpha, first_b.alpha) and np.array_equal(first_a.beta, first_b.beta))
    passed = increase <= tol and (gap <= identical_tol if identical else True)
    return DifferenceReport(
        times=a.times.tolist(),
        energies=energies,
        max_increase=increase,
        max_coefficient_gap=gap,
        identical_initial=identical,
        passed=passed,
    )


def parseval_gaps(trajectory: Trajectory, solid: SolidEigenBasis) -> np.ndarray:
    """Per frame, max_j (||phi_j||^2_B - sum_r delta_jr^2 c_r) / ||phi_j||^2_B."""
    out = np.zeros(len(trajectory.frames))
    for k, frame in enumerate(trajectory.frames):
        coeffs = frame.matrices.coefficients
        norms = np.einsum("ij,ij->j", coeffs.composed, solid.mass @ coeffs.composed)
        partial = (coeffs.delta**2) @ solid.c
        significant = norms > 0.0
        if significant.any():
            out[k] = float(((norms - partial)[significant] / norms[significant]).max())
    return out


def basis_checks(fluid: FluidEigenBasis, solid: SolidEigenBasis, settings: Settings, nu_0: float) -> list[Check]:
    """Basis quality checks; the Korn constant of span(psi) is bounded below by nu_0 / 2."""
    solid_gram = solid.c_gram()
    l2 = solid.l2_gram()
    return [
        at_most("fluid_orthonormality", fluid.orthonormality_error(), settings.orthonormality_tol),
        at_most("fluid_a_orthogonality", fluid.a_orthogonality_error(), settings.a_orthogonality_tol),
        at_most("fluid_eigen_residual", float(fluid.residuals().max()), settings.eigen_residual_tol),
        at_most("fluid_divergence", float(fluid.divergence_norms().max()), settings.divergence_tol),
        at_least("fluid_korn_constant", fluid.korn_constant(), 0.5 * nu_0 * (1.0 - settings.psd_tol)),
        at_most("solid_c_orthonormality", float(np.abs(solid_gram - np.eye(solid.R)).max()), settings.orthonormality_tol),
        at_most("solid_l2_orthogonality", float(np.abs(l2 - np.diag(solid.c)).max()), settings.orthonormality_tol),
        at_most("solid_eigen_residual", float(solid.residuals().max()), settings.eigen_residual_tol),
        at_least("solid_min_eigenvalue", float(solid.eigenvalues.min()), 1.0 - settings.psd_tol),
    ]


def build_report(
    *,
    scenario: str,
    scenario_hash: str,
    context: CouplingContext,
    trajectory: Trajectory,
    energy_records: Sequence[EnergyRecord],
    recoveries: Iterable[RecoveryFields],
    assumption: AssumptionReport,
    settings: Settings,
) -> VerificationReport:
    """Run the default check suite of a completed run."""
    fluid, solid = context.fluid, context.solid
    params = trajectory.params
    recoveries = list(recoveries)
    checks = basis_checks(fluid, solid, settings, params.nu_0)
    checks.append(Check(
        name="motion_assumption",
        passed=assumption.passed,
        measured=assumption.max_det_error,
        threshold=assumption.tolerance,
    ))

    smallest_c, shift = mass_psd_margin(trajectory)
    checks.append(at_least("coupling_c_psd", smallest_c, -settings.psd_tol))
    checks.append(reported("coupling_tail", max(f.matrices.tail for f in trajectory.frames)))
    if params.delta_rho >= 0.0:
        checks.append(at_least("mass_correction_psd", shift, -settings.psd_tol))
        checks.append(at_most("energy_estimate", energy_excess(list(energy_records)), settings.energy_tol))
    else:
        logger.warning("Energy estimate not certified for drho=%.4g < 0; reporting only", params.delta_rho)
        checks.append(reported("energy_estimate", energy_excess(list(energy_records))))

    step_drift = max_relative_step_drift(trajectory)
    if context.constant:
        checks.append(at_most("energy_step_identity", step_drift, settings.psd_tol))
    else:
        checks.append(reported("energy_step_identity", step_drift))

    checks.append(at_most("constraint", constraint_residual(trajectory, context), settings.constraint_tol))
    checks.append(at_most("kinematic_drift", kinematic_drift(trajectory, solid), settings.kinematic_tol))
    checks.append(at_most("series_tail", float(parseval_gaps(trajectory, solid).max(initial=0.0)), settings.tail_gap_tol))
    for name, ratio in a_priori_ratios(trajectory, fluid, solid).items():
        checks.append(at_most(f"a_priori_{name}", ratio, settings.a_priori_factor))

    if recoveries:
        checks.append(at_most("split_residual", max(r.split_residual for r in recoveries), settings.split_tol))
        checks.append(at_most("pressure_divfree_residual", max(r.divfree_residual for r in recoveries), settings.pressure_tol))
        checks.append(at_most("pressure_mean", max(abs(r.pressure_mean) for r in recoveries), settings.pressure_mean_tol))
        checks.append(reported("multiplier_continuity", max(r.continuity for r in recoveries)))
        checks.append(reported("inf_sup", recoveries[0].inf_sup))

    report = VerificationReport(scenario=scenario, scenario_hash=scenario_hash, checks=checks)
    failure = report.first_failure
    if failure is not None:
        logger.warning("Check %s failed: measured %.3e, threshold %s", failure.name, failure.measured, failure.threshold)
    return report
