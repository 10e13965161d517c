"""Implicit-midpoint integration of the Galerkin system.

    (rho_f I + drho C) alpha' = -(Lambda + drho D) alpha - kappa E (beta - beta_ref)
    beta' = B^T alpha

The coupled matrices of each step are frozen at the step midpoint.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as la

from .state import GalerkinState, PhysicalParams, galerkin_energy
from ..config import get_settings
from ..coupling.matrices import CoupledMatrices, CouplingContext
from ..errors import SingularMassError

logger = logging.getLogger(__name__)


def corrected_mass(params: PhysicalParams, matrices: CoupledMatrices) -> np.ndarray:
    m = matrices.C.shape[0]
    return params.rho_f * np.eye(m) + params.delta_rho * matrices.C


def check_mass(mass: np.ndarray, t: float, eps: float | None = None) -> float:
    """Smallest eigenvalue of the corrected mass; raise if it is below ``eps``."""
    eps = get_settings().mass_invertibility_eps if eps is None else eps
    smallest = float(np.linalg.eigvalsh(mass)[0])
    if smallest < eps:
        raise SingularMassError(t, smallest)
    return smallest


def damping(params: PhysicalParams, eigenvalues: np.ndarray, matrices: CoupledMatrices) -> np.ndarray:
    return np.diag(eigenvalues) + params.delta_rho * matrices.D


def ode_rhs(
    t: float,
    state: GalerkinState,
    params: PhysicalParams,
    matrices: CoupledMatrices,
    eigenvalues: np.ndarray,
    beta_ref: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (alpha', beta') of the Galerkin system at time t.

    Raises:
        SingularMassError: rho_f I + drho C(t) has an eigenvalue below the invertibility threshold.
    """
    beta_ref = np.zeros(state.m) if beta_ref is None else beta_ref
    mass = corrected_mass(params, matrices)
    check_mass(mass, t)
    force = damping(params, eigenvalues, matrices) @ state.alpha + params.kappa * matrices.E @ (state.beta - beta_ref)
    alpha_rate = -np.linalg.solve(mass, force)
    beta_rate = matrices.B.T @ state.alpha
    return alpha_rate, beta_rate


def midpoint_update(
    state: GalerkinState,
    dt: float,
    params: PhysicalParams,
    matrices: CoupledMatrices,
    eigenvalues: np.ndarray,
    beta_ref: np.ndarray,
) -> GalerkinState:
    """Solve the 2m x 2m midpoint system with the given (midpoint) matrices.

    The unknowns are alpha and the strain beta - beta_ref, so a state at rest
    with beta = beta_ref is reproduced exactly.
    """
    m = state.m
    mass = corrected_mass(params, matrices)
    check_mass(mass, matrices.time)
    K = damping(params, eigenvalues, matrices)
    elastic = params.kappa * matrices.E
    half = 0.5 * dt
    identity = np.eye(m)

    lhs = np.block([[mass + half * K, half * elastic], [-half * matrices.B.T, identity]])
    rhs_matrix = np.block([[mass - half * K, -half * elastic], [half * matrices.B.T, identity]])
    rhs = rhs_matrix @ np.concatenate([state.alpha, state.beta - beta_ref])
    solution = la.solve(lhs, rhs)
    return GalerkinState(t=state.t + dt, alpha=solution[:m], beta=solution[m:] + beta_ref)


def step(
    state: GalerkinState,
    dt: float,
    params: PhysicalParams,
    context: CouplingContext,
    beta_ref: np.ndarray | None = None,
) -> GalerkinState:
    """Advance one implicit-midpoint step of size dt."""
    if dt <= 0.0:
        raise ValueError(f"time step must be positive, got dt={dt}")
    beta_ref = np.zeros(state.m) if beta_ref is None else beta_ref
    matrices = context.at(state.t + 0.5 * dt)
    return midpoint_update(state, dt, params, matrices, context.fluid.eigenvalues, beta_ref)


@dataclass(frozen=True, eq=False)
class Frame:
    """Stored output time: state, matrices at that time and cumulative energy bookkeeping."""

    state: GalerkinState
    matrices: CoupledMatrices
    solid_velocity: np.ndarray
    dissipation: float
    drift: float
    kinematic: np.ndarray
    step: int

    @property
    def t(self) -> float:
        return self.state.t


@dataclass(eq=False)
class Trajectory:
    params: PhysicalParams
    dt: float
    dt_out: float
    steps_per_output: int
    beta_ref: np.ndarray
    eigenvalues: np.ndarray
    elastic_weights: np.ndarray
    frames: list[Frame] = field(default_factory=list)
    step_energy: list[float] = field(default_factory=list)
    step_drift: list[float] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([frame.t for frame in self.frames])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([frame.state.alpha for frame in self.frames])

    @property
    def betas(self) -> np.ndarray:
        return np.array([frame.state.beta for frame in self.frames])

    @property
    def final(self) -> GalerkinState:
        return self.frames[-1].state


def _frame(state, matrices, dissipation, drift, kinematic, step_index) -> Frame:
    composed = matrices.coefficients.composed
    return Frame(
        state=state,
        matrices=matrices,
        solid_velocity=composed @ state.alpha,
        dissipation=dissipation,
        drift=drift,
        kinematic=kinematic.copy(),
        step=step_index,
    )


def step_count(span: float, dt: float, what: str = "final time") -> int:
    n = int(round(span / dt))
    if n < 1 or abs(n * dt - span) > 1e-9 * max(1.0, span):
        raise ValueError(f"{what} {span!r} is not an integer multiple of dt={dt!r}")
    return n


def integrate(
    initial: GalerkinState,
    context: CouplingContext,
    params: PhysicalParams,
    dt: float,
    final_time: float,
    dt_out: float,
    beta_ref: np.ndarray | None = None,
    on_frame: Callable[[Frame], None] | None = None,
) -> Trajectory:
    """Run the midpoint scheme from ``initial`` to ``final_time`` storing a frame every ``dt_out``.

    Per step the integrator records the energy at the step end and the drift
    r_n = E(t_{n+1}) - E(t_n) + 2 dt abar^T Lambda abar, abar the step midpoint.
    """
    n_steps = step_count(final_time - initial.t, dt)
    per_output = step_count(dt_out, dt, what="output interval")
    if n_steps % per_output:
        raise ValueError(f"output interval {dt_out!r} does not divide the run length {final_time - initial.t!r}")
    beta_ref = np.zeros(initial.m) if beta_ref is None else np.asarray(beta_ref, dtype=float)
    if params.delta_rho < 0.0:
        logger.warning("Solid lighter than fluid (drho=%.4g); mass invertibility is checked every step", params.delta_rho)

    eigenvalues = context.fluid.eigenvalues
    d = context.solid.d
    trajectory = Trajectory(
        params=params,
        dt=dt,
        dt_out=dt_out,
        steps_per_output=per_output,
        beta_ref=beta_ref,
        eigenvalues=eigenvalues,
        elastic_weights=d[: initial.m].copy(),
    )

    def energy(state: GalerkinState, matrices: CoupledMatrices) -> float:
        return sum(galerkin_energy(state.alpha, state.beta, matrices.C, d, params, beta_ref))

    state = initial
    current = context.at(state.t)
    check_mass(corrected_mass(params, current), state.t)
    current_energy = energy(state, current)
    trajectory.step_energy.append(current_energy)
    dissipation = 0.0
    drift = 0.0
    kinematic = np.zeros(initial.m)
    first = _frame(state, current, dissipation, drift, kinematic, 0)
    trajectory.frames.append(first)
    if on_frame is not None:
        on_frame(first)

    logger.info("Integrating %d steps of dt=%.3g (m=%d, %d frames)", n_steps, dt, initial.m, n_steps // per_output + 1)
    for n in range(1, n_steps + 1):
        mid = context.at(initial.t + (n - 0.5) * dt)
        new_state = midpoint_update(state, dt, params, mid, eigenvalues, beta_ref)
        new_state = GalerkinState(t=initial.t + n * dt, alpha=new_state.alpha, beta=new_state.beta)
        end = context.at(new_state.t)

        abar = 0.5 * (state.alpha + new_state.alpha)
        step_dissipation = 2.0 * dt * float(abar @ (eigenvalues * abar))
        new_energy = energy(new_state, end)
        r_n = new_energy - current_energy + step_dissipation
        dissipation += step_dissipation
        kinematic += 0.5 * dt * (current.B.T @ state.alpha + end.B.T @ new_state.alpha)
        drift += r_n
        trajectory.step_energy.append(new_energy)
        trajectory.step_drift.append(r_n)
        logger.debug("step %d t=%.6g E=%.12g r=%.3e", n, new_state.t, new_energy, r_n)

        state, current, current_energy = new_state, end, new_energy
        if n % per_output == 0:
            frame = _frame(state, current, dissipation, drift, kinematic, n)
            trajectory.frames.append(frame)
            if on_frame is not None:
                on_frame(frame)

    logger.info(
        "Integration done: E(0)=%.6g, E(T)=%.6g, dissipation=%.6g, drift=%.3e",
        trajectory.step_energy[0], current_energy, dissipation, drift,
    )
    return trajectory
