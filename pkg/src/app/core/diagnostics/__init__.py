from .checks import (
    Check,
    DifferenceReport,
    VerificationReport,
    a_priori_ratios,
    at_least,
    at_most,
    basis_checks,
    build_report,
    constraint_residual,
    constraint_residuals,
    difference_decay,
    kinematic_drift,
    mass_psd_margin,
    parseval_gaps,
    reported,
)
from .convergence import CauchyRow, SelfConvergenceRow, TailRow, cauchy_table, self_convergence_table, series_tail
from .energy import EnergyRecord, energy, energy_excess, max_relative_step_drift

__all__ = [
    "CauchyRow",
    "Check",
    "DifferenceReport",
    "EnergyRecord",
    "SelfConvergenceRow",
    "TailRow",
    "VerificationReport",
    "a_priori_ratios",
    "at_least",
    "at_most",
    "basis_checks",
    "build_report",
    "cauchy_table",
    "constraint_residual",
    "constraint_residuals",
    "difference_decay",
    "energy",
    "energy_excess",
    "kinematic_drift",
    "mass_psd_margin",
    "max_relative_step_drift",
    "parseval_gaps",
    "reported",
    "self_convergence_table",
    "series_tail",
]
