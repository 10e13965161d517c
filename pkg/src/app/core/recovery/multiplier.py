"""Lagrange multiplier lambda(t) = sum_r l_r chi_r and the solid split equation."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel

from ..coupling.matrices import CoupledMatrices
from ..evolution.state import GalerkinState, PhysicalParams
from ..spectral.solid import SolidEigenBasis


class SplitReport(BaseModel):
    """Residuals of delta_rho (dw/dt, z)_B + kappa (grad X, grad z)_B - c(lambda, z) over z = chi_1..chi_R."""

    time: float
    residuals: list[float]
    max_residual: float
    threshold: float
    passed: bool


def _pad(values: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    out[: values.size] = values
    return out


def recover_multiplier(
    state: GalerkinState,
    alpha_rate: np.ndarray,
    matrices: CoupledMatrices,
    solid: SolidEigenBasis,
    params: PhysicalParams,
    beta_ref: np.ndarray | None = None,
) -> np.ndarray:
    """Closed-form multiplier coefficients l_r, r <= R, using c-orthonormality of chi."""
    coeffs = matrices.coefficients
    beta_ref = np.zeros(state.m) if beta_ref is None else beta_ref
    inertia = params.delta_rho * (alpha_rate @ coeffs.delta + state.alpha @ coeffs.delta_rate) * solid.c
    elastic = params.kappa * _pad(state.beta - beta_ref, solid.R) * solid.d
    return inertia + elastic


def solid_acceleration(state: GalerkinState, alpha_rate: np.ndarray, matrices: CoupledMatrices) -> np.ndarray:
    """Nodal dw/dt on the solid grid: sum_j alpha'_j phi_j + alpha_j phi'_j."""
    coeffs = matrices.coefficients
    return coeffs.composed @ alpha_rate + coeffs.composed_rate @ state.alpha


def _solid_load(state, alpha_rate, matrices, solid, params, beta_ref) -> np.ndarray:
    beta_ref = np.zeros(state.m) if beta_ref is None else beta_ref
    acceleration = solid_acceleration(state, alpha_rate, matrices)
    displacement = solid.field(state.beta - beta_ref)
    return solid.modes.T @ (params.delta_rho * (solid.mass @ acceleration) + params.kappa * (solid.stiffness @ displacement))


def multiplier_by_gram_solve(
    state: GalerkinState,
    alpha_rate: np.ndarray,
    matrices: CoupledMatrices,
    solid: SolidEigenBasis,
    params: PhysicalParams,
    beta_ref: np.ndarray | None = None,
) -> np.ndarray:
    """Multiplier from a dense solve of the c-Gram system with directly assembled loads."""
    return np.linalg.solve(solid.c_gram(), _solid_load(state, alpha_rate, matrices, solid, params, beta_ref))


def verify_split(
    state: GalerkinState,
    alpha_rate: np.ndarray,
    multiplier: np.ndarray,
    matrices: CoupledMatrices,
    solid: SolidEigenBasis,
    params: PhysicalParams,
    beta_ref: np.ndarray | None = None,
    tol: float = 1e-9,
) -> SplitReport:
    """Evaluate the solid equation with finite element products against every chi_r."""
    load = _solid_load(state, alpha_rate, matrices, solid, params, beta_ref)
    pairing = solid.c_gram() @ _pad(np.asarray(multiplier), solid.R)
    residuals = load - pairing
    worst = float(np.abs(residuals).max())
    return SplitReport(
        time=state.t,
        residuals=residuals.tolist(),
        max_residual=worst,
        threshold=tol,
        passed=worst <= tol,
    )


def multiplier_norm(multiplier: np.ndarray) -> float:
    """||lambda||_{1,B}; the chi_r are c-orthonormal."""
    return float(np.linalg.norm(multiplier))


def continuity_ratio(
    state: GalerkinState,
    alpha_rate: np.ndarray,
    multiplier: np.ndarray,
    matrices: CoupledMatrices,
    solid: SolidEigenBasis,
    params: PhysicalParams,
    beta_ref: np.ndarray | None = None,
) -> float:
    """||lambda|| / (||dw/dt||_B + kappa ||grad X||_B), or 0 when the denominator vanishes."""
    beta_ref = np.zeros(state.m) if beta_ref is None else beta_ref
    acceleration = solid_acceleration(state, alpha_rate, matrices)
    strain = state.beta - beta_ref
    denominator = float(np.sqrt(max(acceleration @ (solid.mass @ acceleration), 0.0)))
    denominator += params.kappa * float(np.sqrt(np.sum(solid.d[: strain.size] * strain**2)))
    return multiplier_norm(multiplier) / denominator if denominator > 0.0 else 0.0
