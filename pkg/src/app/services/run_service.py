"""Service layer for running scenarios and convergence studies.

This module gives the CLI and the FastAPI layer one entry point to the run
pipeline without depending directly on LangGraph or the numerical core.
"""

import logging
from pathlib import Path
from typing import Sequence

import numpy as np

from ..core import io
from ..core.config import Settings, get_settings
from ..core.diagnostics.convergence import CauchyRow, SelfConvergenceRow, cauchy_table, self_convergence_table
from ..core.geometry.grids import build_grids
from ..core.pipeline import RunState, run_pipeline
from ..core.spectral.fluid import solve_fluid_eigenproblem
from ..core.spectral.solid import solve_solid_eigenproblem
from ..models import Scenario

logger = logging.getLogger(__name__)


def default_output_dir(scenario: Scenario) -> Path:
    return Path(scenario.output_dir or Path("runs") / f"{scenario.name}-{scenario.hash}")


def write_outputs(state: RunState, directory: Path) -> Path:
    """Write every artifact of a finished run into ``directory`` (created if needed)."""
    scenario = state["scenario"]
    directory.mkdir(parents=True, exist_ok=True)
    io.write_scenario(directory, scenario)
    io.write_trajectory(directory, state["trajectory"], scenario.hash)
    io.write_energy(directory, state["energy_records"])
    if state.get("recoveries"):
        io.write_recovery(directory, state["recoveries"])
    io.write_eigenpairs(directory, state["fluid"], state["solid"])
    io.write_report(directory, state["report"])
    io.write_plotdata(directory)
    logger.info("Wrote run artifacts of %s to %s", scenario.name, directory)
    return directory


def run_scenario(
    scenario: Scenario,
    settings: Settings | None = None,
    output_dir: Path | None = None,
    write: bool = True,
    recover: bool = True,
) -> RunState:
    """Run a scenario through the pipeline and optionally write its artifacts.

    Returns:
        Final pipeline state; ``state["report"]`` holds the verification report.
    """
    started = io.utc_now()
    state = run_pipeline(scenario, settings=settings, recover=recover)
    if write:
        directory = output_dir or default_output_dir(scenario)
        write_outputs(state, directory)
        io.write_metadata(directory, started, io.utc_now())
    return state


def _with_discretization(scenario: Scenario, **update) -> Scenario:
    payload = scenario.canonical()
    payload["discretization"] = {**payload["discretization"], **update}
    return Scenario.model_validate(payload)


def _shared_bases(scenario: Scenario, m: int, R: int, settings: Settings):
    fluid_grid, solid_grid = build_grids(scenario.geometry, scenario.motion, settings.quadrature_order)
    params = scenario.params
    fluid = solve_fluid_eigenproblem(fluid_grid, params.nu_f, params.nu_s, m, body=scenario.geometry.body)
    solid = solve_solid_eigenproblem(solid_grid, R)
    return fluid, solid


def convergence_study(scenario: Scenario, m_list: Sequence[int], settings: Settings | None = None) -> list[CauchyRow]:
    """Terminal-state Cauchy table over Galerkin dimensions sharing grids and the solid basis.

    All runs use R = truncation_factor * max(m_list); bases are solved once for the
    largest sizes and truncated per run.
    """
    settings = settings or get_settings()
    ms = sorted(set(int(m) for m in m_list))
    R = settings.truncation_factor * ms[-1]
    fluid, solid = _shared_bases(scenario, ms[-1], R, settings)

    terminal = {}
    for m in ms:
        variant = _with_discretization(scenario, m=m, R=R)
        state = run_pipeline(variant, settings=settings, recover=False, fluid=fluid, solid=solid)
        final = state["trajectory"].final
        terminal[m] = (final.alpha, final.beta)
        logger.info("Convergence run m=%d done: |alpha(T)|=%.6g", m, float(np.linalg.norm(final.alpha)))
    return cauchy_table(terminal, solid.d)


def dt_study(scenario: Scenario, dt_list: Sequence[float], settings: Settings | None = None) -> list[SelfConvergenceRow]:
    """Terminal-state differences over time steps at fixed m and R (output only at T)."""
    settings = settings or get_settings()
    fluid, solid = _shared_bases(scenario, scenario.m, scenario.R, settings)

    terminal = {}
    for dt in sorted(set(float(dt) for dt in dt_list), reverse=True):
        variant = _with_discretization(scenario, dt=dt, dt_out=scenario.final_time)
        state = run_pipeline(variant, settings=settings, recover=False, fluid=fluid, solid=solid)
        terminal[dt] = state["trajectory"].final.vector()
        logger.info("Time-step run dt=%.3g done", dt)
    return self_convergence_table(terminal)
