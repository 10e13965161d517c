"""Series tails of the coupling sums and Galerkin / time-step convergence tables."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
from pydantic import BaseModel

from ..coupling.compose import compose_field
from ..coupling.matrices import compute_delta
from ..geometry.motion import PrescribedMotion
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis


class TailRow(BaseModel):
    t: float
    R: int
    weighted_sum: float
    plain_sum: float
    rate_sum: float
    oracle: float
    gap: float
    saturation: float


def series_tail(
    j: int,
    R_list: Sequence[int],
    fluid: FluidEigenBasis,
    solid: SolidEigenBasis,
    motion: PrescribedMotion,
    times: Sequence[float],
) -> list[TailRow]:
    """Partial sums of delta_jr^2 c_r, delta_jr^2 and delta'_jr^2 c_r for each truncation R.

    ``j`` is the zero-based fluid mode index. The oracle is ||psi_j o X(t)||^2_{0,B}
    by quadrature on the solid grid; ``gap`` is (oracle - weighted_sum) / oracle and
    ``saturation`` the share of the last term in the weighted sum.
    """
    if max(R_list) > solid.R:
        raise ValueError(f"solid basis has {solid.R} modes, cannot sum to R={max(R_list)}")
    grid = solid.grid
    rows: list[TailRow] = []
    for t in times:
        coeffs = compute_delta(t, fluid.truncate(j + 1), solid, motion)
        delta, rate = coeffs.delta[j], coeffs.delta_rate[j]
        samples = compose_field(fluid.modes[:, j], fluid.grid, motion, t, grid.quad_points)
        oracle = float(grid.quad_weights @ np.sum(samples**2, axis=1))
        for R in sorted(R_list):
            terms = delta[:R] ** 2 * solid.c[:R]
            weighted = float(terms.sum())
            rows.append(
                TailRow(
                    t=float(t),
                    R=int(R),
                    weighted_sum=weighted,
                    plain_sum=float(np.sum(delta[:R] ** 2)),
                    rate_sum=float(np.sum(rate[:R] ** 2 * solid.c[:R])),
                    oracle=oracle,
                    gap=(oracle - weighted) / oracle if oracle > 0.0 else 0.0,
                    saturation=float(terms[-1] / weighted) if weighted > 0.0 else 0.0,
                )
            )
    return rows


class CauchyRow(BaseModel):
    m_coarse: int
    m_fine: int
    fluid_difference: float
    elastic_difference: float


def _pad(values: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    out[: values.size] = values
    return out


def cauchy_table(terminal: Mapping[int, tuple[np.ndarray, np.ndarray]], d: np.ndarray) -> list[CauchyRow]:
    """Differences of terminal states of consecutive Galerkin dimensions.

    Args:
        terminal: m -> (alpha(T), beta(T)) from runs sharing grids and the solid basis.
        d: Elastic weights d_r of the shared solid basis (at least max m entries).
    """
    ms = sorted(terminal)
    rows = []
    for coarse, fine in zip(ms, ms[1:]):
        alpha_c, beta_c = terminal[coarse]
        alpha_f, beta_f = terminal[fine]
        da = alpha_f - _pad(alpha_c, fine)
        db = beta_f - _pad(beta_c, fine)
        rows.append(
            CauchyRow(
                m_coarse=coarse,
                m_fine=fine,
                fluid_difference=float(np.linalg.norm(da)),
                elastic_difference=float(np.sqrt(np.sum(d[:fine] * db**2))),
            )
        )
    return rows


class SelfConvergenceRow(BaseModel):
    dt_coarse: float
    dt_fine: float
    difference: float
    ratio: float | None = None


def self_convergence_table(terminal: Mapping[float, np.ndarray]) -> list[SelfConvergenceRow]:
    """Terminal-state differences of successive time steps and their ratios (about 4 for order 2)."""
    steps = sorted(terminal, reverse=True)
    rows: list[SelfConvergenceRow] = []
    for coarse, fine in zip(steps, steps[1:]):
        difference = float(np.linalg.norm(terminal[coarse] - terminal[fine]))
        ratio = None
        if rows and difference > 0.0:
            ratio = rows[-1].difference / difference
        rows.append(SelfConvergenceRow(dt_coarse=coarse, dt_fine=fine, difference=difference, ratio=ratio))
    return rows
