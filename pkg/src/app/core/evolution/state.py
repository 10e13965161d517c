"""Physical parameters, Galerkin state and projection of the initial data."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..coupling.compose import composition_operator
from ..errors import IncompatibleInitialDataError
from ..geometry.motion import PrescribedMotion
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis

logger = logging.getLogger(__name__)


class PhysicalParams(BaseModel):
    """Densities, viscosities and elastic modulus of the linearized problem.

    ``elastic_reference`` selects the configuration the elastic term is
    measured from: ``"origin"`` uses kappa (grad X, grad z)_B as is,
    ``"initial"`` uses kappa (grad (X - X0^m), grad z)_B so that zero velocity
    data is a rest state.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    rho_f: float = Field(default=1.0, gt=0.0)
    rho_s: float = Field(default=1.0, gt=0.0)
    nu_f: float = Field(default=1.0, gt=0.0)
    nu_s: float = Field(default=1.0, gt=0.0)
    kappa: float = Field(default=1.0, gt=0.0)
    elastic_reference: Literal["origin", "initial"] = "origin"

    @property
    def delta_rho(self) -> float:
        return self.rho_s - self.rho_f

    @property
    def nu_0(self) -> float:
        return min(self.nu_f, self.nu_s)


@dataclass(frozen=True, eq=False)
class GalerkinState:
    """Coefficients of u^m = sum alpha_j psi_j and X^m = sum beta_j chi_j at time t."""

    t: float
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self) -> None:
        if self.alpha.shape != self.beta.shape or self.alpha.ndim != 1:
            raise ValueError(f"alpha {self.alpha.shape} and beta {self.beta.shape} must be vectors of equal length")
        if not (np.isfinite(self.alpha).all() and np.isfinite(self.beta).all()):
            raise ValueError(f"non-finite Galerkin coefficients at t={self.t}")

    @property
    def m(self) -> int:
        return self.alpha.size

    def vector(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.beta])


@dataclass(frozen=True, eq=False)
class InitialData:
    """Initial fluid velocity u0 (fluid nodal), solid velocity us0 (solid nodal); X0 is the identity."""

    u0: np.ndarray
    us0: np.ndarray

    @classmethod
    def from_fluid_field(cls, u0: np.ndarray, fluid: FluidEigenBasis, solid: SolidEigenBasis, motion: PrescribedMotion) -> "InitialData":
        """Take us0 as the restriction of u0 to the body, the compatible choice."""
        op = composition_operator(fluid.grid, motion, 0.0, solid.grid.nodes)
        return cls(u0=np.asarray(u0, dtype=float), us0=op.apply(np.asarray(u0, dtype=float)))

    @classmethod
    def zero(cls, fluid: FluidEigenBasis, solid: SolidEigenBasis) -> "InitialData":
        return cls(u0=np.zeros(2 * fluid.grid.n_nodes), us0=np.zeros(2 * solid.grid.n_nodes))


def check_compatibility(
    data: InitialData,
    fluid: FluidEigenBasis,
    solid: SolidEigenBasis,
    motion: PrescribedMotion,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Return (divergence defect, restriction defect) of the initial data.

    Raises:
        IncompatibleInitialDataError: div u0 != 0, u0 nonzero on the fluid boundary,
            or u0 o X(0) != us0 in L2(B).
    """
    u0 = data.u0
    scale = max(1.0, float(np.abs(u0).max(initial=0.0)))
    boundary = fluid.grid.vector_dofs(fluid.grid.boundary_nodes)
    divergence = float(np.linalg.norm(fluid.divergence @ u0))
    if divergence > tol * scale or np.abs(u0[boundary]).max(initial=0.0) > tol * scale:
        raise IncompatibleInitialDataError(
            f"initial velocity must be divergence-free with zero trace: |div u0|={divergence:.3e}"
        )
    op = composition_operator(fluid.grid, motion, 0.0, solid.grid.nodes)
    gap = op.apply(u0) - data.us0
    restriction = float(np.sqrt(max(gap @ (solid.mass @ gap), 0.0)))
    if restriction > tol * scale:
        raise IncompatibleInitialDataError(
            f"initial solid velocity must equal the fluid velocity on the body: "
            f"||u0 o X(0) - us0||_B = {restriction:.3e}"
        )
    return divergence, restriction


def reference_coefficients(solid: SolidEigenBasis, m: int) -> np.ndarray:
    """beta_0j = (s, chi_j)_B / c_j, the projection of the identity map X0(s) = s."""
    return solid.project(solid.grid.nodes.ravel(), m)


def project_initial_data(
    data: InitialData,
    fluid: FluidEigenBasis,
    solid: SolidEigenBasis,
    motion: PrescribedMotion,
    tol: float = 1e-10,
) -> GalerkinState:
    """Project the compatible initial data onto the first m modes."""
    check_compatibility(data, fluid, solid, motion, tol)
    alpha = fluid.modes.T @ (fluid.mass @ data.u0)
    beta = reference_coefficients(solid, fluid.m)
    return GalerkinState(t=0.0, alpha=alpha, beta=beta)


def elastic_reference(params: PhysicalParams, solid: SolidEigenBasis, m: int) -> np.ndarray:
    if params.elastic_reference == "initial":
        return reference_coefficients(solid, m)
    return np.zeros(m)


def galerkin_energy(
    alpha: np.ndarray,
    beta: np.ndarray,
    C: np.ndarray,
    d: np.ndarray,
    params: PhysicalParams,
    beta_ref: np.ndarray,
) -> tuple[float, float, float]:
    """Kinetic, solid-excess and elastic parts of the discrete energy."""
    kinetic = params.rho_f * float(alpha @ alpha)
    excess = params.delta_rho * float(alpha @ C @ alpha)
    strain = beta - beta_ref
    elastic = params.kappa * float(np.sum(d[: strain.size] * strain**2))
    return kinetic, excess, elastic
