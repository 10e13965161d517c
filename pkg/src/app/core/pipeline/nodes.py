"""Node implementations of the run pipeline."""

import logging

import numpy as np

from .state import RunState
from ..coupling.matrices import CouplingContext
from ..diagnostics.checks import build_report
from ..diagnostics.energy import energy
from ..errors import BasisSizeError
from ..evolution.integrator import integrate
from ..evolution.state import InitialData, elastic_reference, project_initial_data
from ..geometry.grids import build_grids
from ..geometry.motion import verify_assumption
from ..recovery.fields import recover_frame
from ..recovery.pressure import PressureSolver
from ..spectral.fluid import FluidEigenBasis, solve_fluid_eigenproblem
from ..spectral.solid import SolidEigenBasis, solve_solid_eigenproblem

logger = logging.getLogger(__name__)


def _initial_data(state: RunState, fluid: FluidEigenBasis, solid: SolidEigenBasis) -> InitialData:
    selector = state["scenario"].initial_data
    motion = state["scenario"].motion
    if selector.kind == "zero":
        return InitialData.zero(fluid, solid)
    if selector.kind == "first_fluid_mode":
        return InitialData.from_fluid_field(selector.amplitude * fluid.modes[:, 0], fluid, solid, motion)
    coefficients = np.asarray(selector.coefficients, dtype=float)
    u0 = fluid.modes[:, : coefficients.size] @ coefficients
    return InitialData.from_fluid_field(u0, fluid, solid, motion)


def discretize_node(state: RunState) -> RunState:
    """Build the grids (or reuse those of prefilled bases) and sample the motion assumption."""
    scenario = state["scenario"]
    settings = state["settings"]
    fluid, solid = state.get("fluid"), state.get("solid")
    if fluid is not None and solid is not None:
        fluid_grid, solid_grid = fluid.grid, solid.grid
    else:
        fluid_grid, solid_grid = build_grids(scenario.geometry, scenario.motion, settings.quadrature_order)

    times = np.linspace(0.0, scenario.final_time, settings.motion_sample_times)
    assumption = verify_assumption(scenario.motion, solid_grid, fluid_grid, times, tol=settings.det_tol)
    if not assumption.passed:
        logger.warning(
            "Motion %s violates the immersed-solid assumption (max |det - 1| = %.3e, contained=%s)",
            scenario.motion.kind, assumption.max_det_error, assumption.contained,
        )
    logger.info("Discretized %s: fluid %d nodes, solid %d nodes", scenario.name, fluid_grid.n_nodes, solid_grid.n_nodes)
    return {"fluid_grid": fluid_grid, "solid_grid": solid_grid, "assumption": assumption}


def bases_node(state: RunState) -> RunState:
    """Solve both eigenproblems, or truncate bases handed in by a convergence study."""
    scenario = state["scenario"]
    params = scenario.params
    m, R = scenario.m, scenario.R

    fluid = state.get("fluid")
    if fluid is None:
        fluid = solve_fluid_eigenproblem(state["fluid_grid"], params.nu_f, params.nu_s, m, body=scenario.geometry.body)
    elif fluid.m < m:
        raise BasisSizeError(f"prefilled fluid basis has {fluid.m} modes, scenario needs m={m}")
    else:
        fluid = fluid.truncate(m)

    solid = state.get("solid")
    if solid is None:
        solid = solve_solid_eigenproblem(state["solid_grid"], R)
    elif solid.R < R:
        raise BasisSizeError(f"prefilled solid basis has {solid.R} modes, scenario needs R={R}")
    else:
        solid = solid.truncate(R)

    return {"fluid": fluid, "solid": solid}


def integrate_node(state: RunState) -> RunState:
    scenario = state["scenario"]
    params = scenario.params
    fluid, solid = state["fluid"], state["solid"]

    context = CouplingContext(fluid, solid, scenario.motion)
    initial = project_initial_data(_initial_data(state, fluid, solid), fluid, solid, scenario.motion)
    beta_ref = elastic_reference(params, solid, fluid.m)
    trajectory = integrate(
        initial,
        context,
        params,
        scenario.time_step,
        scenario.final_time,
        scenario.output_interval,
        beta_ref=beta_ref,
    )
    return {"context": context, "initial": initial, "beta_ref": beta_ref, "trajectory": trajectory}


def recover_node(state: RunState) -> RunState:
    """Recover multiplier and pressure at every stored frame."""
    settings = state["settings"]
    context = state["context"]
    solver = PressureSolver(
        context.fluid,
        kernel_rtol=settings.pressure_kernel_rtol,
        inf_sup_threshold=settings.inf_sup_threshold,
    )
    params = state["scenario"].params
    recoveries = [
        recover_frame(frame, context, params, solver, state["beta_ref"], split_tol=settings.split_tol)
        for frame in state["trajectory"].frames
    ]
    logger.info("Recovered multiplier and pressure at %d frames", len(recoveries))
    return {"recoveries": recoveries}


def diagnose_node(state: RunState) -> RunState:
    scenario = state["scenario"]
    trajectory = state["trajectory"]
    records = energy(trajectory)
    report = build_report(
        scenario=scenario.name,
        scenario_hash=scenario.hash,
        context=state["context"],
        trajectory=trajectory,
        energy_records=records,
        recoveries=state.get("recoveries") or [],
        assumption=state["assumption"],
        settings=state["settings"],
    )
    logger.info("Run %s: %d checks, passed=%s", scenario.name, len(report.checks), report.passed)
    return {"energy_records": records, "report": report}
