"""Tensor-product Gauss rules and Q1 shape functions on the unit cell [0,1]^2.

Local node order is counter-clockwise starting at the lower-left corner:
(0,0), (1,0), (1,1), (0,1).
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=8)
def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre rule on [0,1]^2 with ``order`` points per axis.

    Returns:
        (points, weights) with points of shape (order**2, 2); weights sum to 1.
    """
    x, w = leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    xi, eta = np.meshgrid(x, x, indexing="xy")
    wx, wy = np.meshgrid(w, w, indexing="xy")
    points = np.column_stack([xi.ravel(), eta.ravel()])
    weights = (wx * wy).ravel()
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def q1_values(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Bilinear shape functions at local coordinates, shape (n, 4)."""
    return np.column_stack(
        [(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), xi * eta, (1.0 - xi) * eta]
    )


def q1_derivatives(xi: np.ndarray, eta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Local derivatives (d/dxi, d/deta) of the bilinear shape functions, each (n, 4)."""
    dxi = np.column_stack([-(1.0 - eta), (1.0 - eta), eta, -eta])
    deta = np.column_stack([-(1.0 - xi), -xi, xi, (1.0 - xi)])
    return dxi, deta
