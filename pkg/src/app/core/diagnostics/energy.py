"""Energy bookkeeping of Galerkin trajectories."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel

from ..evolution.integrator import Trajectory
from ..evolution.state import galerkin_energy

ENERGY_FLOOR = 1e-30


class EnergyRecord(BaseModel):
    """Energy terms at one output time.

    ``dissipation`` is the per-step midpoint accumulation of 2 a(u, u);
    ``dissipation_trapezoid`` is the trapezoid rule over output times.
    """

    t: float
    kinetic: float
    excess: float
    elastic: float
    total: float
    dissipation: float
    dissipation_trapezoid: float
    drift: float
    initial: float


def energy(trajectory: Trajectory) -> list[EnergyRecord]:
    """Energy terms, cumulative dissipation and motion drift at every stored frame."""
    params = trajectory.params
    records: list[EnergyRecord] = []
    trapezoid = 0.0
    previous_rate = None
    previous_t = None
    initial = None
    for frame in trajectory.frames:
        alpha = frame.state.alpha
        kinetic, excess, elastic = galerkin_energy(
            alpha, frame.state.beta, frame.matrices.C, trajectory.elastic_weights, params, trajectory.beta_ref
        )
        total = kinetic + excess + elastic
        rate = 2.0 * float(alpha @ (trajectory.eigenvalues * alpha))
        if previous_rate is not None:
            trapezoid += 0.5 * (frame.t - previous_t) * (rate + previous_rate)
        previous_rate, previous_t = rate, frame.t
        if initial is None:
            initial = total
        records.append(
            EnergyRecord(
                t=frame.t,
                kinetic=kinetic,
                excess=excess,
                elastic=elastic,
                total=total,
                dissipation=frame.dissipation,
                dissipation_trapezoid=trapezoid,
                drift=frame.drift,
                initial=initial,
            )
        )
    return records


def energy_excess(records: list[EnergyRecord]) -> float:
    """max_t E(t) + dissipation(t) - E(0); nonpositive up to rounding for a dissipative run."""
    return max(r.total + r.dissipation - r.initial for r in records)


def max_relative_step_drift(trajectory: Trajectory, floor: float = ENERGY_FLOOR) -> float:
    """max_n |r_n| / max(E(t_n), E(0), floor) over all integrator steps.

    A run that stays at rest has r_n = E = 0 and reports 0.
    """
    if not trajectory.step_drift:
        return 0.0
    drift = np.abs(np.asarray(trajectory.step_drift))
    energies = np.abs(np.asarray(trajectory.step_energy[:-1]))
    scale = np.maximum(np.maximum(energies, energies[0]), floor)
    return float((drift / scale).max())
