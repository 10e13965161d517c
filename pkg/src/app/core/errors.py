"""Exception hierarchy shared by the solver packages."""


class DLMError(Exception):
    """Base class for all solver errors."""


class GeometryError(DLMError, ValueError):
    """Invalid grid resolution or a solid body that is not immersed in the fluid box."""


class MotionTimeError(DLMError, ValueError):
    """A motion was evaluated outside of [0, T]."""


class ContainmentError(DLMError):
    """A mapped solid point left the fluid box."""

    def __init__(self, point, time: float, mapped) -> None:
        self.point = tuple(float(c) for c in point)
        self.time = float(time)
        self.mapped = tuple(float(c) for c in mapped)
        super().__init__(
            f"solid point s={self.point} is mapped to {self.mapped} outside the fluid box at t={self.time:.6g}"
        )


class BasisSizeError(DLMError, ValueError):
    """Requested more eigenpairs than the discrete space holds."""


class SingularMassError(DLMError):
    """The corrected mass matrix rho_f I + drho C(t) is not invertible."""

    def __init__(self, time: float, min_eigenvalue: float) -> None:
        self.time = float(time)
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"mass matrix rho_f I + drho C(t) is singular at t={self.time:.6g} "
            f"(min eigenvalue {self.min_eigenvalue:.3e})"
        )


class IncompatibleInitialDataError(DLMError, ValueError):
    """Initial data violates div u0 = 0 or u0 restricted to the solid = us0."""


class ScenarioMismatchError(DLMError, ValueError):
    """Two trajectories being compared come from different scenarios."""


class RunDirectoryError(DLMError):
    """A run directory is missing artifacts or holds unreadable files."""


class ConfigError(DLMError):
    """A scenario file could not be parsed or validated; carries the offending line."""

    def __init__(self, path, line: int, message: str) -> None:
        self.path = str(path)
        self.line = int(line)
        self.message = message
        super().__init__(f"{self.path}:{self.line}: {message}")
