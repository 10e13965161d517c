"""LangGraph state schema for the run pipeline."""

from typing import TypedDict

import numpy as np

from ..config import Settings
from ..coupling.matrices import CouplingContext
from ..diagnostics.checks import VerificationReport
from ..diagnostics.energy import EnergyRecord
from ..evolution.integrator import Trajectory
from ..evolution.state import GalerkinState
from ..geometry.grids import FluidDomainGrid, SolidReferenceGrid
from ..geometry.motion import AssumptionReport
from ..recovery.fields import RecoveryFields
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis
from ...models import Scenario


class RunState(TypedDict, total=False):
    """State flowing through the run pipeline.

    1. discretize: populates the grids and the motion `assumption` report
    2. bases: populates `fluid` and `solid` (truncating prefilled bases if given)
    3. integrate: populates `context`, `initial`, `beta_ref` and `trajectory`
    4. recover: populates `recoveries` when `recover` is set
    5. diagnose: populates `energy_records` and `report`
    """
    scenario: Scenario
    settings: Settings
    recover: bool
    fluid_grid: FluidDomainGrid
    solid_grid: SolidReferenceGrid
    assumption: AssumptionReport
    fluid: FluidEigenBasis | None
    solid: SolidEigenBasis | None
    context: CouplingContext
    initial: GalerkinState
    beta_ref: np.ndarray
    trajectory: Trajectory
    recoveries: list[RecoveryFields]
    energy_records: list[EnergyRecord]
    report: VerificationReport
