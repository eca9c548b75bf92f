import numpy as np
import pytest

from uavpath import (
    CostWeights,
    FlightConstraints,
    Scenario,
    SyntheticTerrainSpec,
    Threat,
    generate_synthetic,
)


@pytest.fixture(scope="session")
def flat_terrain():
    spec = SyntheticTerrainSpec(n_cols=11, n_rows=11, cell_size=10.0, base_elevation=0.0)
    return generate_synthetic(spec, 0)


@pytest.fixture(scope="session")
def flat_scenario(flat_terrain):
    """Threat-free 100 m box over flat ground, endpoints at mid-corridor."""
    return Scenario(
        terrain=flat_terrain,
        threats=(),
        start=[10.0, 10.0, 70.0],
        goal=[90.0, 90.0, 70.0],
        constraints=FlightConstraints(),
        weights=CostWeights(),
        n_waypoints=6,
    )


@pytest.fixture(scope="session")
def hilly_scenario():
    """Small scenario with hills and two threats near the diagonal."""
    spec = SyntheticTerrainSpec(
        n_cols=21, n_rows=21, cell_size=10.0, base_elevation=0.0,
        n_hills=3, amp_min=5.0, amp_max=12.0, sigma_min=30.0, sigma_max=60.0,
    )
    terrain = generate_synthetic(spec, 7)
    ground = lambda x, y: float(terrain.heights(x, y))
    return Scenario(
        terrain=terrain,
        threats=(Threat(80.0, 90.0, 18.0), Threat(130.0, 120.0, 15.0)),
        start=[15.0, 15.0, ground(15.0, 15.0) + 70.0],
        goal=[185.0, 185.0, ground(185.0, 185.0) + 70.0],
        constraints=FlightConstraints(),
        weights=CostWeights(),
        n_waypoints=8,
    )


def random_feasibleish_path(scenario, rng, n=None):
    """Random path with corridor-following altitudes; may still cross threats."""
    n = n or scenario.n_waypoints
    x_min, x_max, y_min, y_max = scenario.terrain.bounds
    xs = rng.uniform(x_min, x_max, n - 2)
    ys = rng.uniform(y_min, y_max, n - 2)
    ground = scenario.terrain.heights(xs, ys)
    zs = ground + rng.uniform(
        scenario.constraints.h_min, scenario.constraints.h_max, n - 2
    )
    interior = np.column_stack([xs, ys, zs])
    return np.vstack([scenario.start, interior, scenario.goal])
