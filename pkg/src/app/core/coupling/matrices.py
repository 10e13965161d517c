"""Coupling coefficients delta(t), delta'(t) and the matrices B, C, D, E of the Galerkin system.

phi_j(t) = psi_j o X(t) is represented by its nodal interpolant on the solid
grid, so every B-integral involving phi_j is an exact finite element
product and delta_jr = lambda_r (phi_j, chi_r)_B coincides with c(phi_j, chi_r).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .compose import CompositionOperator, composition_operator
from ..config import get_settings
from ..geometry.motion import PrescribedMotion
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CouplingCoefficients:
    """delta_jr(t) = c(phi_j(t), chi_r) and its time derivative, both (m, R)."""

    time: float
    delta: np.ndarray
    delta_rate: np.ndarray
    composed: np.ndarray
    composed_rate: np.ndarray
    operator: CompositionOperator
    quadrature_order: int

    @property
    def m(self) -> int:
        return self.delta.shape[0]

    @property
    def R(self) -> int:
        return self.delta.shape[1]


@dataclass(frozen=True, eq=False)
class CoupledMatrices:
    time: float
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    tail: float
    asymmetry: float
    coefficients: CouplingCoefficients


def compute_delta(
    t: float,
    fluid: FluidEigenBasis,
    solid: SolidEigenBasis,
    motion: PrescribedMotion,
) -> CouplingCoefficients:
    """delta via lambda_r (psi_j o X(t), chi_r)_B and delta' via the chain rule.

    Raises:
        ContainmentError: a solid node is mapped outside the fluid box at t.
    """
    op = composition_operator(fluid.grid, motion, t, solid.grid.nodes)
    composed = op.apply(fluid.modes)
    composed_rate = op.apply_rate(fluid.modes)
    weighted = (solid.mass @ solid.modes) * solid.eigenvalues
    return CouplingCoefficients(
        time=float(t),
        delta=composed.T @ weighted,
        delta_rate=composed_rate.T @ weighted,
        composed=composed,
        composed_rate=composed_rate,
        operator=op,
        quadrature_order=solid.grid.quadrature_order,
    )


def delta_direct(coeffs: CouplingCoefficients, solid: SolidEigenBasis) -> np.ndarray:
    """c(phi_j, chi_r) evaluated with the assembled c-form instead of the eigen identity."""
    return coeffs.composed.T @ (solid.c_form @ solid.modes)


def tail_size(R: int) -> int:
    """Number of trailing solid modes counted as the truncation tail (last decile)."""
    return max(1, math.ceil(R / 10))


def assemble_matrices(
    coeffs: CouplingCoefficients,
    solid: SolidEigenBasis,
    symmetry_warn_tol: float | None = None,
) -> CoupledMatrices:
    """Assemble B_ji = delta_ji, C_ij = sum_r delta_jr delta_ir c_r, D_ij = sum_r delta'_jr delta_ir c_r,
    E_ij = delta_ij d_j.

    C is symmetrized by averaging; a warning is logged when the asymmetry
    before averaging exceeds ``symmetry_warn_tol``.
    """
    if symmetry_warn_tol is None:
        symmetry_warn_tol = get_settings().symmetry_warn_tol
    m = coeffs.m
    c, d = solid.c, solid.d
    delta, rate = coeffs.delta, coeffs.delta_rate

    weighted = delta * c
    C = weighted @ delta.T
    asymmetry = float(np.abs(C - C.T).max())
    if asymmetry > symmetry_warn_tol:
        logger.warning("C(t=%.6g) asymmetric by %.3e before symmetrization", coeffs.time, asymmetry)
    C = 0.5 * (C + C.T)
    D = weighted @ rate.T

    k = tail_size(coeffs.R)
    tail_part = weighted[:, -k:] @ delta[:, -k:].T
    scale = float(np.abs(C).max())
    tail = float(np.abs(tail_part).max()) / scale if scale > 0.0 else 0.0

    return CoupledMatrices(
        time=coeffs.time,
        B=delta[:, :m].copy(),
        C=C,
        D=D,
        E=delta[:, :m] * d[:m],
        tail=tail,
        asymmetry=asymmetry,
        coefficients=coeffs,
    )


class CouplingContext:
    """Evaluates the coupled matrices of a fixed (fluid basis, solid basis, motion) triple at any time."""

    def __init__(self, fluid: FluidEigenBasis, solid: SolidEigenBasis, motion: PrescribedMotion) -> None:
        if solid.R < fluid.m:
            raise ValueError(f"solid basis size R={solid.R} must be at least the fluid basis size m={fluid.m}")
        self.fluid = fluid
        self.solid = solid
        self.motion = motion
        self._constant = motion.max_displacement(solid.grid.corners) == 0.0
        self._cached: CoupledMatrices | None = None

    @property
    def m(self) -> int:
        return self.fluid.m

    @property
    def constant(self) -> bool:
        """True when the motion never moves the body, so the matrices are time independent."""
        return self._constant

    def coefficients(self, t: float) -> CouplingCoefficients:
        return compute_delta(t, self.fluid, self.solid, self.motion)

    def at(self, t: float) -> CoupledMatrices:
        if self._constant:
            self.motion.check_time(t)
            if self._cached is None:
                self._cached = assemble_matrices(self.coefficients(0.0), self.solid)
            return replace(self._cached, time=float(t))
        return assemble_matrices(self.coefficients(t), self.solid)
