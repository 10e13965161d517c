"""Service functions for re-verifying stored run directories."""

import logging
from pathlib import Path

import numpy as np

from ..core import io
from ..core.config import Settings, get_settings
from ..core.coupling.matrices import CouplingContext
from ..core.diagnostics.checks import Check, VerificationReport, at_most, build_report
from ..core.diagnostics.energy import EnergyRecord, energy
from ..core.errors import RunDirectoryError
from ..core.evolution.integrator import Frame, Trajectory, integrate, step_count
from ..core.evolution.state import GalerkinState, elastic_reference
from ..core.geometry.grids import build_grids
from ..core.geometry.motion import verify_assumption
from ..core.recovery.fields import recover_frame
from ..core.recovery.pressure import PressureSolver
from ..core.spectral.fluid import solve_fluid_eigenproblem
from ..core.spectral.solid import solve_solid_eigenproblem

logger = logging.getLogger(__name__)

REQUIRED_FILES = (io.SCENARIO_FILE, io.TRAJECTORY_FILE, io.ENERGY_FILE, io.REPORT_FILE)
ENERGY_TERMS = ("kinetic", "excess", "elastic", "total")


def _check_layout(directory: Path) -> None:
    if not directory.is_dir():
        raise RunDirectoryError(f"{directory}: not a run directory")
    missing = [name for name in REQUIRED_FILES if not (directory / name).is_file()]
    if missing:
        raise RunDirectoryError(f"{directory}: missing {', '.join(missing)}")


def _replay(
    times: np.ndarray,
    alphas: np.ndarray,
    betas: np.ndarray,
    context: CouplingContext,
    scenario,
    beta_ref: np.ndarray,
) -> tuple[Trajectory, float]:
    """Rebuild a trajectory from stored states, re-deriving each frame from the previous one.

    Returns the rebuilt trajectory (stored states, replayed energy bookkeeping) and
    the max deviation of a replayed frame from the stored one.
    """
    params = scenario.params
    dt = scenario.time_step
    per_output = step_count(scenario.output_interval, dt, what="output interval")
    trajectory = Trajectory(
        params=params,
        dt=dt,
        dt_out=scenario.output_interval,
        steps_per_output=per_output,
        beta_ref=beta_ref,
        eigenvalues=context.fluid.eigenvalues,
        elastic_weights=context.solid.d[: alphas.shape[1]].copy(),
    )

    dissipation, drift = 0.0, 0.0
    kinematic = np.zeros(alphas.shape[1])
    deviation = 0.0
    for k, t in enumerate(times):
        state = GalerkinState(t=float(t), alpha=alphas[k], beta=betas[k])
        if k > 0:
            start = GalerkinState(t=float(times[k - 1]), alpha=alphas[k - 1], beta=betas[k - 1])
            replay = integrate(start, context, params, dt, float(t), float(t - times[k - 1]), beta_ref=beta_ref)
            end = replay.frames[-1]
            deviation = max(deviation, float(np.abs(end.state.vector() - state.vector()).max()))
            dissipation += end.dissipation
            drift += end.drift
            kinematic = kinematic + end.kinematic
            trajectory.step_energy.extend(replay.step_energy[1:] if trajectory.step_energy else replay.step_energy)
            trajectory.step_drift.extend(replay.step_drift)
        matrices = context.at(state.t)
        trajectory.frames.append(
            Frame(
                state=state,
                matrices=matrices,
                solid_velocity=matrices.coefficients.composed @ state.alpha,
                dissipation=dissipation,
                drift=drift,
                kinematic=kinematic.copy(),
                step=k * per_output,
            )
        )
    return trajectory, deviation


def _energy_gap(records: list[EnergyRecord], stored: dict[str, np.ndarray]) -> float:
    if any(name not in stored for name in ENERGY_TERMS) or stored["t"].size != len(records):
        return float("inf")
    gap = 0.0
    for name in ENERGY_TERMS:
        recomputed = np.array([getattr(r, name) for r in records])
        scale = max(1.0, float(np.abs(recomputed).max(initial=0.0)))
        gap = max(gap, float(np.abs(recomputed - stored[name]).max(initial=0.0)) / scale)
    return gap


def verify_run_dir(directory: Path, settings: Settings | None = None) -> VerificationReport:
    """Re-run the diagnostics on the artifacts of a run directory.

    Raises:
        RunDirectoryError: a required artifact is missing or unreadable.
        ConfigError: the stored scenario does not validate.
    """
    settings = settings or get_settings()
    directory = Path(directory)
    _check_layout(directory)
    scenario = io.load_scenario(directory / io.SCENARIO_FILE)
    recorded_hash, times, alphas, betas = io.read_trajectory(directory)
    if times.size == 0:
        raise RunDirectoryError(f"{directory / io.TRAJECTORY_FILE}: no frames")
    if alphas.shape[1] != scenario.m:
        raise RunDirectoryError(
            f"{directory / io.TRAJECTORY_FILE}: {alphas.shape[1]} coefficients per frame, scenario has m={scenario.m}"
        )

    params = scenario.params
    fluid_grid, solid_grid = build_grids(scenario.geometry, scenario.motion, settings.quadrature_order)
    fluid = solve_fluid_eigenproblem(fluid_grid, params.nu_f, params.nu_s, scenario.m, body=scenario.geometry.body)
    solid = solve_solid_eigenproblem(solid_grid, scenario.R)
    context = CouplingContext(fluid, solid, scenario.motion)
    beta_ref = elastic_reference(params, solid, scenario.m)
    assumption = verify_assumption(
        scenario.motion,
        solid_grid,
        fluid_grid,
        np.linspace(0.0, scenario.final_time, settings.motion_sample_times),
        tol=settings.det_tol,
    )

    trajectory, deviation = _replay(times, alphas, betas, context, scenario, beta_ref)
    records = energy(trajectory)
    stored_energy = io.read_columns(directory / io.ENERGY_FILE)

    recoveries = []
    if (directory / io.RECOVERY_FILE).is_file():
        solver = PressureSolver(fluid, settings.pressure_kernel_rtol, settings.inf_sup_threshold)
        recoveries = [
            recover_frame(frame, context, params, solver, beta_ref, split_tol=settings.split_tol)
            for frame in trajectory.frames
        ]

    stored_checks = [
        Check(name="scenario_hash", passed=recorded_hash == scenario.hash, measured=float(recorded_hash != scenario.hash), threshold=0.0),
        at_most("step_replay", deviation, settings.replay_tol),
        at_most("energy_consistency", _energy_gap(records, stored_energy), settings.energy_consistency_tol),
    ]
    report = build_report(
        scenario=scenario.name,
        scenario_hash=scenario.hash,
        context=context,
        trajectory=trajectory,
        energy_records=records,
        recoveries=recoveries,
        assumption=assumption,
        settings=settings,
    )
    report = VerificationReport(scenario=report.scenario, scenario_hash=report.scenario_hash, checks=stored_checks + report.checks)
    logger.info("Verified %s: passed=%s", directory, report.passed)
    return report


def write_plotdata(directory: Path) -> Path:
    """Emit ``plotdata.csv`` for a run directory from its energy and recovery series."""
    directory = Path(directory)
    if not directory.is_dir():
        raise RunDirectoryError(f"{directory}: not a run directory")
    return io.write_plotdata(directory)
