from .fields import RecoveryFields, recover_frame
from .multiplier import (
    SplitReport,
    continuity_ratio,
    multiplier_by_gram_solve,
    multiplier_norm,
    recover_multiplier,
    solid_acceleration,
    verify_split,
)
from .pressure import PressureSolver, divergence_free_residuals, momentum_load, recover_pressure

__all__ = [
    "PressureSolver",
    "RecoveryFields",
    "SplitReport",
    "continuity_ratio",
    "divergence_free_residuals",
    "momentum_load",
    "multiplier_by_gram_solve",
    "multiplier_norm",
    "recover_frame",
    "recover_multiplier",
    "recover_pressure",
    "solid_acceleration",
    "verify_split",
]
