"""Per-frame recovery of lambda(t) and p(t) with their residual checks."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .multiplier import continuity_ratio, multiplier_norm, recover_multiplier, verify_split
from .pressure import PressureSolver, divergence_free_residuals, momentum_load
from ..coupling.matrices import CouplingContext
from ..evolution.integrator import Frame, ode_rhs
from ..evolution.state import PhysicalParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RecoveryFields:
    time: float
    multiplier: np.ndarray
    pressure: np.ndarray
    multiplier_norm: float
    pressure_norm: float
    pressure_mean: float
    split_residual: float
    divfree_residual: float
    dual_residual: float
    continuity: float
    inf_sup: float


def recover_frame(
    frame: Frame,
    context: CouplingContext,
    params: PhysicalParams,
    pressure_solver: PressureSolver,
    beta_ref: np.ndarray | None = None,
    split_tol: float = 1e-9,
) -> RecoveryFields:
    """Recover the multiplier and the pressure at a stored frame.

    du/dt is taken from the Galerkin right-hand side at the frame time.
    """
    state, matrices = frame.state, frame.matrices
    alpha_rate, _ = ode_rhs(state.t, state, params, matrices, context.fluid.eigenvalues, beta_ref)
    multiplier = recover_multiplier(state, alpha_rate, matrices, context.solid, params, beta_ref)
    split = verify_split(state, alpha_rate, multiplier, matrices, context.solid, params, beta_ref, tol=split_tol)

    load = momentum_load(state, alpha_rate, multiplier, matrices, context.fluid, context.solid, params)
    pressure, dual = pressure_solver.solve(load)
    full_pressure_residual = divergence_free_residuals(load, pressure, context.fluid)

    fields = RecoveryFields(
        time=state.t,
        multiplier=multiplier,
        pressure=pressure,
        multiplier_norm=multiplier_norm(multiplier),
        pressure_norm=pressure_solver.l2_norm(pressure),
        pressure_mean=pressure_solver.mean(pressure),
        split_residual=split.max_residual,
        divfree_residual=float(full_pressure_residual.max()),
        dual_residual=dual,
        continuity=continuity_ratio(state, alpha_rate, multiplier, matrices, context.solid, params, beta_ref),
        inf_sup=pressure_solver.inf_sup,
    )
    logger.debug(
        "t=%.6g |lambda|=%.4g |p|=%.4g split=%.2e divfree=%.2e",
        fields.time, fields.multiplier_norm, fields.pressure_norm, fields.split_residual, fields.divfree_residual,
    )
    return fields
