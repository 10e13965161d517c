"""Scenario schema and API payloads.

A scenario fully determines a run: geometry, prescribed motion, physical
parameters, discretization and initial data. Unknown keys are rejected at
every level.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .core.config import get_settings
from .core.evolution.state import PhysicalParams
from .core.geometry.grids import GeometryConfig, check_immersion
from .core.geometry.motion import Motion
from .core.utils import scenario_hash

SCHEMA_VERSION = 1


class Discretization(BaseModel):
    """Galerkin dimension m, solid truncation R (default ``truncation_factor * m``), dt and output interval."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    m: int = Field(default=8, ge=1)
    R: Optional[int] = Field(default=None, ge=1)
    dt: Optional[float] = Field(default=None, gt=0.0)
    dt_out: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _truncation_covers_m(self) -> "Discretization":
        if self.R is not None and self.R < self.m:
            raise ValueError(f"R={self.R} must be at least m={self.m}")
        return self


class InitialDataConfig(BaseModel):
    """zero, amplitude * psi_1, or a custom coefficient list on psi_1..psi_k (k <= m)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["zero", "first_fluid_mode", "custom"] = "zero"
    amplitude: float = 1.0
    coefficients: Optional[list[float]] = None

    @model_validator(mode="after")
    def _coefficients_match_kind(self) -> "InitialDataConfig":
        if self.kind == "custom" and not self.coefficients:
            raise ValueError("custom initial data needs a non-empty 'coefficients' list")
        if self.kind != "custom" and self.coefficients is not None:
            raise ValueError(f"'coefficients' is only allowed for custom initial data, not {self.kind!r}")
        return self


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str
    geometry: GeometryConfig = GeometryConfig()
    motion: Motion
    params: PhysicalParams = PhysicalParams()
    discretization: Discretization = Discretization()
    initial_data: InitialDataConfig = InitialDataConfig()
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _consistent(self) -> "Scenario":
        check_immersion(self.geometry, self.motion)
        per_output = self.output_interval / self.time_step
        if abs(per_output - round(per_output)) > 1e-9 * per_output or round(per_output) < 1:
            raise ValueError(f"dt_out={self.output_interval!r} must be an integer multiple of dt={self.time_step!r}")
        outputs = self.final_time / self.output_interval
        if abs(outputs - round(outputs)) > 1e-9 * outputs or round(outputs) < 1:
            raise ValueError(f"dt_out={self.output_interval!r} must divide the final time {self.final_time!r}")
        coefficients = self.initial_data.coefficients or []
        if len(coefficients) > self.discretization.m:
            raise ValueError(f"{len(coefficients)} initial coefficients given for m={self.discretization.m} modes")
        return self

    @property
    def final_time(self) -> float:
        return self.motion.final_time

    @property
    def m(self) -> int:
        return self.discretization.m

    @property
    def R(self) -> int:
        return self.discretization.R or get_settings().truncation_factor * self.discretization.m

    @property
    def time_step(self) -> float:
        return self.discretization.dt or 1e-3 * self.final_time

    @property
    def output_interval(self) -> float:
        return self.discretization.dt_out or 0.1 * self.final_time

    def canonical(self) -> dict:
        """JSON form with defaults filled in, the basis of the scenario hash."""
        return self.model_dump(mode="json")

    @property
    def hash(self) -> str:
        payload = self.canonical()
        payload.pop("output_dir", None)
        return scenario_hash(payload)


class RunRequest(BaseModel):
    """Request body for ``POST /runs``."""

    scenario: Scenario
    write_outputs: bool = False


class CheckResult(BaseModel):
    name: str
    passed: bool
    measured: float
    threshold: Optional[float] = None


class RunResponse(BaseModel):
    scenario: str
    scenario_hash: str
    passed: bool
    checks: list[CheckResult]
    final_time: float
    frames: int
    output_dir: Optional[str] = None
