"""Composition of Eulerian fluid fields with the solid motion, v o X(., t)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import ContainmentError
from ..geometry.grids import FluidDomainGrid
from ..geometry.motion import PrescribedMotion


@dataclass(frozen=True, eq=False)
class CompositionOperator:
    """Sparse evaluation of fluid nodal fields at X(s_k, t) for a fixed set of reference points."""

    time: float
    targets: np.ndarray
    mapped: np.ndarray
    velocity: np.ndarray
    value: sp.csr_matrix
    dx: sp.csr_matrix
    dy: sp.csr_matrix

    def vector_operator(self) -> sp.csr_matrix:
        """The interpolation acting on interleaved vector fields, (2n, 2N)."""
        return sp.kron(self.value, sp.identity(2), format="csr")

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Interleaved samples (2n,) or (2n, m) of an interleaved fluid field (2N,) or (2N, m)."""
        return _interleave(self.value @ values[0::2], self.value @ values[1::2])

    def apply_rate(self, values: np.ndarray) -> np.ndarray:
        """(grad v o X) . dX/dt at the targets, interleaved like ``apply``."""
        vx, vy = self.velocity[:, 0], self.velocity[:, 1]
        if np.ndim(values) == 2:
            vx, vy = vx[:, None], vy[:, None]
        rates = []
        for component in (values[0::2], values[1::2]):
            rates.append((self.dx @ component) * vx + (self.dy @ component) * vy)
        return _interleave(*rates)


def _interleave(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.empty((2 * x.shape[0],) + x.shape[1:])
    out[0::2] = x
    out[1::2] = y
    return out


def composition_operator(
    grid: FluidDomainGrid,
    motion: PrescribedMotion,
    t: float,
    targets: np.ndarray,
) -> CompositionOperator:
    """Map the reference targets through the motion and build the interpolation operators.

    Raises:
        ContainmentError: a mapped target lies outside the fluid box.
        MotionTimeError: t is outside [0, T].
    """
    targets = np.atleast_2d(targets)
    mapped = motion.position(targets, t)
    inside = grid.contains(mapped)
    if not inside.all():
        k = int(np.flatnonzero(~inside)[0])
        raise ContainmentError(targets[k], t, mapped[k])
    value, dx, dy = grid.interpolation_matrices(mapped)
    return CompositionOperator(
        time=float(t),
        targets=targets,
        mapped=mapped,
        velocity=motion.velocity(targets, t),
        value=value,
        dx=dx,
        dy=dy,
    )


def compose_field(
    values: np.ndarray,
    grid: FluidDomainGrid,
    motion: PrescribedMotion,
    t: float,
    targets: np.ndarray,
) -> np.ndarray:
    """Bilinear interpolation of a fluid nodal vector field at X(targets, t).

    Returns:
        Samples of shape (n, 2), or (n, 2, m) for a stack of m fields.
    """
    values = np.asarray(values, dtype=float)
    samples = composition_operator(grid, motion, t, targets).apply(values)
    n = np.atleast_2d(targets).shape[0]
    return samples.reshape((n, 2) + values.shape[1:])
