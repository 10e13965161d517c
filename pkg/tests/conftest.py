"""Shared small-grid fixtures. Eigen-solves dominate run time, so bases are session scoped."""

import numpy as np
import pytest

from src.app.core.coupling.matrices import CouplingContext
from src.app.core.evolution.integrator import integrate
from src.app.core.evolution.state import InitialData, PhysicalParams, project_initial_data
from src.app.core.geometry.grids import GeometryConfig, build_grids
from src.app.core.geometry.motion import IdentityMotion, RotationMotion
from src.app.core.spectral.fluid import solve_fluid_eigenproblem
from src.app.core.spectral.solid import solve_solid_eigenproblem
from src.app.models import Scenario

BODY = (0.4, 0.6, 0.4, 0.6)
M = 4
R = 24


@pytest.fixture(scope="session")
def geometry() -> GeometryConfig:
    return GeometryConfig(omega=(0.0, 1.0, 0.0, 1.0), body=BODY, nx=16, ny=16, solid_nx=16, solid_ny=16)


@pytest.fixture(scope="session")
def grids(geometry):
    return build_grids(geometry, IdentityMotion(final_time=1.0))


@pytest.fixture(scope="session")
def fluid_grid(grids):
    return grids[0]


@pytest.fixture(scope="session")
def solid_grid(grids):
    return grids[1]


@pytest.fixture(scope="session")
def fluid(fluid_grid):
    return solve_fluid_eigenproblem(fluid_grid, nu_f=1.0, nu_s=1.0, m=M, body=BODY)


@pytest.fixture(scope="session")
def solid(solid_grid):
    return solve_solid_eigenproblem(solid_grid, R)


@pytest.fixture(scope="session")
def identity_motion():
    return IdentityMotion(final_time=0.1)


@pytest.fixture(scope="session")
def rotation_motion():
    return RotationMotion(final_time=0.1, center=(0.5, 0.5), angular_velocity=1.0)


def first_mode_state(fluid, solid, motion, amplitude: float = 1.0):
    data = InitialData.from_fluid_field(amplitude * fluid.modes[:, 0], fluid, solid, motion)
    return project_initial_data(data, fluid, solid, motion)


@pytest.fixture(scope="session")
def identity_run(fluid, solid, identity_motion):
    params = PhysicalParams(rho_f=1.0, rho_s=2.0, nu_f=1.0, nu_s=1.0, kappa=1.0)
    context = CouplingContext(fluid, solid, identity_motion)
    initial = first_mode_state(fluid, solid, identity_motion)
    trajectory = integrate(initial, context, params, dt=1e-3, final_time=0.1, dt_out=0.01)
    return context, trajectory


@pytest.fixture(scope="session")
def rotation_run(fluid, solid, rotation_motion):
    params = PhysicalParams(rho_f=1.0, rho_s=1.0, nu_f=1.0, nu_s=1.0, kappa=1.0)
    context = CouplingContext(fluid, solid, rotation_motion)
    initial = first_mode_state(fluid, solid, rotation_motion)
    trajectory = integrate(initial, context, params, dt=1e-3, final_time=0.1, dt_out=0.01)
    return context, trajectory


@pytest.fixture(scope="session")
def heavy_rotation_run(fluid, solid, rotation_motion):
    """Moving body denser than the fluid, so the D term of the mass correction is active."""
    params = PhysicalParams(rho_f=1.0, rho_s=5.0, nu_f=1.0, nu_s=1.0, kappa=1.0)
    context = CouplingContext(fluid, solid, rotation_motion)
    initial = first_mode_state(fluid, solid, rotation_motion)
    trajectory = integrate(initial, context, params, dt=5e-4, final_time=0.1, dt_out=0.01)
    return context, trajectory


def scenario_payload(**overrides) -> dict:
    """A small, fast scenario in JSON form; top-level keys can be overridden."""
    payload = {
        "schema_version": 1,
        "name": "small",
        "geometry": {
            "omega": [0.0, 1.0, 0.0, 1.0],
            "body": list(BODY),
            "nx": 12,
            "ny": 12,
            "solid_nx": 10,
            "solid_ny": 10,
        },
        "motion": {"kind": "identity", "final_time": 0.05},
        "params": {"rho_f": 1.0, "rho_s": 2.0, "nu_f": 1.0, "nu_s": 1.0, "kappa": 1.0},
        "discretization": {"m": 3, "R": 24, "dt": 0.001, "dt_out": 0.01},
        "initial_data": {"kind": "first_fluid_mode", "amplitude": 1.0},
    }
    payload.update(overrides)
    return payload


@pytest.fixture
def small_scenario() -> Scenario:
    return Scenario.model_validate(scenario_payload())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def mode_state():
    return first_mode_state


@pytest.fixture(scope="session")
def payload():
    return scenario_payload
