"""Configuration management for the fictitious-domain Galerkin solver.

This module uses Pydantic Settings to load and validate environment variables
for verification tolerances, discretization defaults and logging. Scenario
files (what to solve) are validated separately by `app.models.Scenario`;
the settings here control how strictly results are checked.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings loaded from environment variables (prefix ``DLM_``)."""

    # Logging
    log_level: str = "INFO"

    # Discretization defaults
    quadrature_order: int = Field(default=3, ge=3)
    truncation_factor: int = Field(default=4, ge=1)
    motion_sample_times: int = Field(default=33, ge=2)

    # Eigenbasis checks
    orthonormality_tol: float = 1e-9
    eigen_residual_tol: float = 1e-9
    a_orthogonality_tol: float = 1e-8
    divergence_tol: float = 1e-10

    # Coupling checks
    symmetry_warn_tol: float = 1e-12
    psd_tol: float = 1e-10
    tail_gap_tol: float = 1e-2

    # Evolution
    mass_invertibility_eps: float = 1e-10
    det_tol: float = 1e-10

    # Diagnostics
    energy_tol: float = 1e-8
    constraint_tol: float = 1e-9
    difference_tol: float = 1e-8
    identical_tol: float = 1e-12
    a_priori_factor: float = 10.0
    kinematic_tol: float = 1e-6
    replay_tol: float = 1e-9
    energy_consistency_tol: float = 1e-10

    # Recovery
    split_tol: float = 1e-9
    pressure_tol: float = 1e-8
    pressure_mean_tol: float = 1e-10
    inf_sup_threshold: float = 1e-3
    pressure_kernel_rtol: float = 1e-8

    model_config = SettingsConfigDict(
        env_prefix="DLM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


# Create a singleton settings instance
_settings: Settings | None = None


def get_settings() -> Settings:
    """Get the application settings instance (singleton pattern).

    Returns:
        Settings instance with all configuration values loaded.
    """
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings
