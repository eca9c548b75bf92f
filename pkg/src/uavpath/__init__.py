"""Terrain-aware UAV path planning toolkit.

A cost model over 3D waypoint paths (length, cylindrical threats,
altitude corridor, turn/climb smoothness) plus seven population-based
solvers for it, a deterministic benchmark harness, and paired t-test
reporting.
"""

from .cost import (
    CostBreakdown,
    altitude_cost,
    altitude_penalty,
    climb_angle,
    evaluate_paths,
    path_length_cost,
    segment_threat_penalty,
    smooth_cost,
    threat_cost,
    total_cost,
    turn_angle,
)
from .encodings import (
    clamp_wrap,
    decode_angle,
    decode_cartesian,
    decode_spherical,
    encode_spherical,
    random_genome,
)
from .optimizers import ALGORITHMS, EvolutionTrace, SwarmConfig, run
from .scenario import (
    ConfigError,
    CostWeights,
    FlightConstraints,
    Scenario,
    Threat,
    load_scenario,
    save_scenario,
)
from .stats import SampleSummary, TTestVerdict, Verdict, mean_std, paired_t_test
from .suite import build_benchmark_suite
from .terrain import (
    DemParseError,
    NodataError,
    OutOfBoundsError,
    SyntheticTerrainSpec,
    TerrainMap,
    generate_synthetic,
    height_at,
    load_dem,
    save_dem,
)

__version__ = "0.1.0"
