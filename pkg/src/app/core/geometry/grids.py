"""Structured Q1 grids for the fluid box and the solid reference body.

Both grids are tensor-product rectangles with ``nx * ny`` nodes ordered
x-fastest (node ``j * nx + i``) and ``(nx - 1) * (ny - 1)`` cells. Vector
fields use interleaved degrees of freedom ``2 * node + component``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, model_validator

from .quadrature import gauss_rule, q1_derivatives, q1_values
from ..errors import GeometryError

if TYPE_CHECKING:
    from .motion import PrescribedMotion

logger = logging.getLogger(__name__)

MIN_NODES = 4
_LOCATE_TOL = 1e-12


class GeometryConfig(BaseModel):
    """Scenario geometry: extents as (x0, x1, y0, y1) and node counts per axis."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    omega: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    body: tuple[float, float, float, float] = (0.4, 0.6, 0.4, 0.6)
    nx: int = 32
    ny: int = 32
    solid_nx: int = 16
    solid_ny: int = 16

    @model_validator(mode="after")
    def _ordered_extents(self) -> "GeometryConfig":
        for name, (x0, x1, y0, y1) in (("omega", self.omega), ("body", self.body)):
            if not (x0 < x1 and y0 < y1):
                raise ValueError(f"{name} extents must satisfy x0 < x1 and y0 < y1, got {(x0, x1, y0, y1)}")
        return self


@dataclass(frozen=True, eq=False)
class RectGrid:
    """Axis-aligned rectangle discretized by bilinear cells with a Gauss rule per cell."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    nodes: np.ndarray
    cells: np.ndarray
    quad_points: np.ndarray
    quad_weights: np.ndarray
    quadrature_order: int

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny

    @property
    def n_cells(self) -> int:
        return (self.nx - 1) * (self.ny - 1)

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def corners(self) -> np.ndarray:
        return np.array([[self.x0, self.y0], [self.x1, self.y0], [self.x1, self.y1], [self.x0, self.y1]])

    def contains(self, points: np.ndarray, tol: float = _LOCATE_TOL) -> np.ndarray:
        points = np.atleast_2d(points)
        scale = max(1.0, abs(self.x1), abs(self.y1))
        return (
            (points[:, 0] >= self.x0 - tol * scale)
            & (points[:, 0] <= self.x1 + tol * scale)
            & (points[:, 1] >= self.y0 - tol * scale)
            & (points[:, 1] <= self.y1 + tol * scale)
        )

    def locate(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Containing cell and local coordinates of points (caller checks containment).

        Points on an interior cell edge are assigned to the cell above/right of it.
        """
        points = np.atleast_2d(points)
        fx = (points[:, 0] - self.x0) / self.hx
        fy = (points[:, 1] - self.y0) / self.hy
        i = np.clip(np.floor(fx).astype(np.int64), 0, self.nx - 2)
        j = np.clip(np.floor(fy).astype(np.int64), 0, self.ny - 2)
        return j * (self.nx - 1) + i, fx - i, fy - j

    def interpolation_matrices(self, points: np.ndarray) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
        """Sparse operators evaluating a nodal scalar field and its x/y derivatives at points."""
        points = np.atleast_2d(points)
        n = points.shape[0]
        cell, xi, eta = self.locate(points)
        rows = np.repeat(np.arange(n), 4)
        cols = self.cells[cell].ravel()
        values = q1_values(xi, eta)
        dxi, deta = q1_derivatives(xi, eta)
        shape = (n, self.n_nodes)
        P = sp.csr_matrix((values.ravel(), (rows, cols)), shape=shape)
        Px = sp.csr_matrix(((dxi / self.hx).ravel(), (rows, cols)), shape=shape)
        Py = sp.csr_matrix(((deta / self.hy).ravel(), (rows, cols)), shape=shape)
        return P, Px, Py

    def vector_dofs(self, nodes: np.ndarray) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.int64)
        return np.column_stack([2 * nodes, 2 * nodes + 1]).ravel()


@dataclass(frozen=True, eq=False)
class FluidDomainGrid(RectGrid):
    """The fluid box Omega with its boundary-node set."""

    boundary_nodes: np.ndarray
    interior_nodes: np.ndarray

    @property
    def interior_dofs(self) -> np.ndarray:
        return self.vector_dofs(self.interior_nodes)


@dataclass(frozen=True, eq=False)
class SolidReferenceGrid(RectGrid):
    """The reference body B strictly inside Omega."""

    @property
    def measure(self) -> float:
        return float(self.quad_weights.sum())


def _rect_arrays(bounds: tuple[float, float, float, float], nx: int, ny: int, order: int) -> dict:
    x0, x1, y0, y1 = bounds
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    ci, cj = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing="xy")
    base = (cj * nx + ci).ravel()
    cells = np.column_stack([base, base + 1, base + nx + 1, base + nx])

    hx = (x1 - x0) / (nx - 1)
    hy = (y1 - y0) / (ny - 1)
    ref_points, ref_weights = gauss_rule(order)
    origin = nodes[cells[:, 0]]
    quad_points = (
        origin[:, None, :] + ref_points[None, :, :] * np.array([hx, hy])[None, None, :]
    ).reshape(-1, 2)
    quad_weights = np.tile(ref_weights * hx * hy, cells.shape[0])

    for array in (nodes, cells, quad_points, quad_weights):
        array.setflags(write=False)
    return dict(
        x0=float(x0), x1=float(x1), y0=float(y0), y1=float(y1), nx=nx, ny=ny,
        nodes=nodes, cells=cells, quad_points=quad_points, quad_weights=quad_weights,
        quadrature_order=order,
    )


def check_immersion(config: GeometryConfig, motion: "PrescribedMotion | None" = None) -> float:
    """Validate resolutions and the immersion margin; return the margin.

    The body must keep at least one fluid cell plus the motion's maximal
    displacement away from the fluid boundary.
    """
    for name in ("nx", "ny", "solid_nx", "solid_ny"):
        value = getattr(config, name)
        if value < MIN_NODES:
            raise GeometryError(f"{name}={value} is too coarse; need at least {MIN_NODES} nodes per axis")

    ox0, ox1, oy0, oy1 = config.omega
    bx0, bx1, by0, by1 = config.body
    margin = min(bx0 - ox0, ox1 - bx1, by0 - oy0, oy1 - by1)
    if margin <= 0.0:
        raise GeometryError(f"solid not immersed: body {config.body} touches or crosses omega {config.omega}")

    cell = max((ox1 - ox0) / (config.nx - 1), (oy1 - oy0) / (config.ny - 1))
    corners = np.array([[bx0, by0], [bx1, by0], [bx1, by1], [bx0, by1]])
    displacement = motion.max_displacement(corners) if motion is not None else 0.0
    if margin < cell + displacement:
        raise GeometryError(
            f"solid not immersed: margin {margin:.4g} is below one fluid cell ({cell:.4g}) "
            f"plus the maximal displacement ({displacement:.4g})"
        )
    return margin


def build_grids(
    config: GeometryConfig,
    motion: "PrescribedMotion | None" = None,
    quadrature_order: int = 3,
) -> tuple[FluidDomainGrid, SolidReferenceGrid]:
    """Build the fluid and solid grids after checking that the body is immersed."""
    check_immersion(config, motion)

    fluid = _rect_arrays(config.omega, config.nx, config.ny, quadrature_order)
    i = np.arange(config.nx * config.ny) % config.nx
    j = np.arange(config.nx * config.ny) // config.nx
    on_boundary = (i == 0) | (i == config.nx - 1) | (j == 0) | (j == config.ny - 1)
    boundary_nodes = np.flatnonzero(on_boundary)
    interior_nodes = np.flatnonzero(~on_boundary)
    fluid_grid = FluidDomainGrid(**fluid, boundary_nodes=boundary_nodes, interior_nodes=interior_nodes)

    solid_grid = SolidReferenceGrid(**_rect_arrays(config.body, config.solid_nx, config.solid_ny, quadrature_order))
    logger.info(
        "Built fluid grid %dx%d and solid grid %dx%d (|B|=%.4g)",
        config.nx, config.ny, config.solid_nx, config.solid_ny, solid_grid.measure,
    )
    return fluid_grid, solid_grid
