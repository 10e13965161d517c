"""Prescribed volume-preserving solid motions s -> X(s, t).

Every motion is a pydantic model so it can be loaded straight from a scenario
file (discriminated on ``kind``) and is immutable once built. Evaluators are
vectorized over reference points of shape (n, 2).
"""

from __future__ import annotations

import itertools
import logging
from abc import ABC, abstractmethod
from typing import Annotated, Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import MotionTimeError

logger = logging.getLogger(__name__)

_TIME_SLACK = 1e-12
_GAMMA_SAMPLE_POINTS = 64


class PrescribedMotion(BaseModel, ABC):
    """A map X(s, t) with X(s, 0) = s and det(grad_s X) = 1, defined on [0, final_time]."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    final_time: float = Field(default=1.0, gt=0.0)

    def check_time(self, t: float) -> float:
        slack = _TIME_SLACK * max(1.0, self.final_time)
        if not (-slack <= t <= self.final_time + slack):
            raise MotionTimeError(f"time t={t!r} is outside [0, {self.final_time!r}]")
        return float(min(max(t, 0.0), self.final_time))

    def position(self, s: np.ndarray, t: float) -> np.ndarray:
        return self._position(np.atleast_2d(s).astype(float), self.check_time(t))

    def gradient(self, s: np.ndarray, t: float) -> np.ndarray:
        return self._gradient(np.atleast_2d(s).astype(float), self.check_time(t))

    def velocity(self, s: np.ndarray, t: float) -> np.ndarray:
        return self._velocity(np.atleast_2d(s).astype(float), self.check_time(t))

    def evaluate(self, s: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Position, gradient (2x2 per point) and velocity of the motion at (s, t).

        A single point of shape (2,) gives unbatched results.
        """
        single = np.ndim(s) == 1
        t = self.check_time(t)
        points = np.atleast_2d(s).astype(float)
        out = (self._position(points, t), self._gradient(points, t), self._velocity(points, t))
        if single:
            return out[0][0], out[1][0], out[2][0]
        return out

    @abstractmethod
    def _position(self, s: np.ndarray, t: float) -> np.ndarray: ...

    @abstractmethod
    def _gradient(self, s: np.ndarray, t: float) -> np.ndarray: ...

    @abstractmethod
    def _velocity(self, s: np.ndarray, t: float) -> np.ndarray: ...

    def max_displacement(self, points: np.ndarray) -> float:
        """Upper bound of |X(s, t) - s| over the given points and t in [0, T]."""
        times = np.linspace(0.0, self.final_time, 257)
        points = np.atleast_2d(points).astype(float)
        return max(float(np.linalg.norm(self._position(points, t) - points, axis=1).max()) for t in times)


def _identity_gradients(n: int) -> np.ndarray:
    return np.broadcast_to(np.eye(2), (n, 2, 2)).copy()


class IdentityMotion(PrescribedMotion):
    """The solid stays at its reference configuration."""

    kind: Literal["identity"] = "identity"

    def _position(self, s, t):
        return s.copy()

    def _gradient(self, s, t):
        return _identity_gradients(s.shape[0])

    def _velocity(self, s, t):
        return np.zeros_like(s)

    def max_displacement(self, points) -> float:
        return 0.0


class TranslationMotion(PrescribedMotion):
    """Rigid oscillation X = s + a sin(omega t)."""

    kind: Literal["translation"] = "translation"
    amplitude: tuple[float, float] = (0.05, 0.0)
    frequency: float = 1.0

    def _position(self, s, t):
        return s + np.asarray(self.amplitude) * np.sin(self.frequency * t)

    def _gradient(self, s, t):
        return _identity_gradients(s.shape[0])

    def _velocity(self, s, t):
        v = np.asarray(self.amplitude) * self.frequency * np.cos(self.frequency * t)
        return np.broadcast_to(v, s.shape).copy()

    def max_displacement(self, points) -> float:
        phase = abs(self.frequency) * self.final_time
        peak = 1.0 if phase >= 0.5 * np.pi else np.sin(phase)
        return float(np.hypot(*self.amplitude) * peak)


class RotationMotion(PrescribedMotion):
    """Rigid rotation X = c + R(omega t)(s - c) about a fixed center."""

    kind: Literal["rotation"] = "rotation"
    center: tuple[float, float] = (0.5, 0.5)
    angular_velocity: float = 1.0

    def _rotation(self, t: float) -> np.ndarray:
        theta = self.angular_velocity * t
        c, s = np.cos(theta), np.sin(theta)
        return np.array([[c, -s], [s, c]])

    def _position(self, s, t):
        center = np.asarray(self.center)
        return center + (s - center) @ self._rotation(t).T

    def _gradient(self, s, t):
        return np.broadcast_to(self._rotation(t), (s.shape[0], 2, 2)).copy()

    def _velocity(self, s, t):
        center = np.asarray(self.center)
        generator = np.array([[0.0, -1.0], [1.0, 0.0]])
        return self.angular_velocity * (s - center) @ (generator @ self._rotation(t)).T

    def max_displacement(self, points) -> float:
        radius = float(np.linalg.norm(np.atleast_2d(points) - np.asarray(self.center), axis=1).max())
        sweep = min(abs(self.angular_velocity) * self.final_time, np.pi)
        return 2.0 * radius * float(np.sin(0.5 * sweep))


class ShearMotion(PrescribedMotion):
    """Unimodular shear X = (s_x + a t (s_y - c_y), s_y)."""

    kind: Literal["shear"] = "shear"
    rate: float = 0.1
    center_y: float = 0.5

    def _position(self, s, t):
        out = s.copy()
        out[:, 0] += self.rate * t * (s[:, 1] - self.center_y)
        return out

    def _gradient(self, s, t):
        grad = _identity_gradients(s.shape[0])
        grad[:, 0, 1] = self.rate * t
        return grad

    def _velocity(self, s, t):
        out = np.zeros_like(s)
        out[:, 0] = self.rate * (s[:, 1] - self.center_y)
        return out

    def max_displacement(self, points) -> float:
        lever = float(np.abs(np.atleast_2d(points)[:, 1] - self.center_y).max())
        return abs(self.rate) * self.final_time * lever


Motion = Annotated[
    Union[IdentityMotion, TranslationMotion, RotationMotion, ShearMotion],
    Field(discriminator="kind"),
]


class AssumptionReport(BaseModel):
    """Outcome of checking a motion for unit Jacobian, containment and a Lipschitz inverse."""

    max_det_error: float
    gamma: float
    contained: bool
    initial_error: float
    sample_times: list[float]
    tolerance: float
    passed: bool


def _sample_pairs(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    stride = max(1, points.shape[0] // _GAMMA_SAMPLE_POINTS)
    subset = np.arange(0, points.shape[0], stride)
    pairs = np.array(list(itertools.combinations(subset, 2)), dtype=np.int64)
    return pairs[:, 0], pairs[:, 1]


def verify_assumption(
    motion: PrescribedMotion,
    body,
    omega,
    sample_times: Sequence[float],
    tol: float = 1e-10,
) -> AssumptionReport:
    """Sample the motion and report whether it satisfies the immersed-solid assumptions.

    Args:
        motion: The prescribed motion.
        body: Solid reference grid; its quadrature points carry the Jacobian check and its
            nodes the Lipschitz-inverse sampling.
        omega: Fluid grid (anything with ``contains``) used for the containment check.
        sample_times: Non-empty times in [0, T].
        tol: Threshold on max |det - 1|.
    """
    if len(sample_times) == 0:
        raise ValueError("verify_assumption needs at least one sample time")

    first, second = _sample_pairs(body.nodes)
    reference_gaps = np.linalg.norm(body.nodes[first] - body.nodes[second], axis=1)

    max_det_error = 0.0
    gamma = np.inf
    contained = True
    for t in sample_times:
        grads = motion.gradient(body.quad_points, t)
        det = grads[:, 0, 0] * grads[:, 1, 1] - grads[:, 0, 1] * grads[:, 1, 0]
        max_det_error = max(max_det_error, float(np.abs(det - 1.0).max()))

        mapped = motion.position(body.nodes, t)
        gaps = np.linalg.norm(mapped[first] - mapped[second], axis=1)
        gamma = min(gamma, float((gaps / reference_gaps).min()))

        # all shipped motions are affine in s, so the mapped corners bound the image
        if not omega.contains(motion.position(body.corners, t)).all():
            contained = False

    initial_error = float(np.abs(motion.position(body.nodes, 0.0) - body.nodes).max())
    passed = max_det_error <= tol and gamma > 0.0 and contained and initial_error <= tol
    report = AssumptionReport(
        max_det_error=max_det_error,
        gamma=float(gamma),
        contained=contained,
        initial_error=initial_error,
        sample_times=[float(t) for t in sample_times],
        tolerance=tol,
        passed=passed,
    )
    if not passed:
        logger.warning("Motion %s fails the immersion assumptions: %s", type(motion).__name__, report)
    return report
