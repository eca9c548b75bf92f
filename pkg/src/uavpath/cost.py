"""Path cost model: length, threat, altitude and smoothness terms plus the
weighted total.

A path is an (n, 3) array of waypoints in meters whose first and last rows
are the fixed start and goal.  Infeasible features (collision, corridor
violation, off-map flight) make the affected term infinite, and any
infinite weighted term makes the total infinite.

All functions are pure; the ``*_many`` variants evaluate a whole stack of
paths (M, n, 3) in vectorized form and are what the optimizers call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import FlightConstraints, Scenario, Threat

EPS_LEN = 1e-9  # below this a segment counts as degenerate


@dataclass(frozen=True)
class CostBreakdown:
    f1: float
    f2: float
    f3: float
    f4: float
    total: float


def _as_paths(waypoints) -> np.ndarray:
    """Coerce (n,3) or (M,n,3) input to (M,n,3)."""
    arr = np.asarray(waypoints, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[-1] != 3:
        raise ValueError(f"expected waypoints of shape (n, 3), got {arr.shape}")
    return arr


# --- F1: path length ---------------------------------------------------------

def length_cost_many(paths: np.ndarray) -> np.ndarray:
    steps = np.diff(paths, axis=-2)
    return np.sqrt((steps**2).sum(axis=-1)).sum(axis=-1)


def path_length_cost(waypoints) -> float:
    """Sum of Euclidean segment lengths."""
    return float(length_cost_many(_as_paths(waypoints))[0])


# --- F2: threat cost ---------------------------------------------------------

def threat_cost_many(paths: np.ndarray, threats, constraints: FlightConstraints) -> np.ndarray:
    if len(threats) == 0:
        return np.zeros(paths.shape[0])
    centers = np.array([[t.center_x, t.center_y] for t in threats])  # (K, 2)
    radii = np.array([t.radius for t in threats])
    a = paths[:, :-1, None, :2]  # (M, n-1, 1, 2)
    b = paths[:, 1:, None, :2]
    ab = b - a
    ap = centers[None, None, :, :] - a
    denom = (ab**2).sum(axis=-1)  # (M, n-1, 1)
    t = np.divide((ap * ab).sum(axis=-1), denom, out=np.zeros_like(ap[..., 0]), where=denom > 0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * ab
    d = np.sqrt(((centers[None, None, :, :] - closest) ** 2).sum(axis=-1))  # (M, n-1, K)
    collide_r = constraints.drone_diameter + radii  # (K,)
    danger_r = constraints.danger_distance + collide_r
    penalty = np.where(d <= collide_r, np.inf, np.clip(danger_r - d, 0.0, None))
    return penalty.sum(axis=(1, 2))


def segment_threat_penalty(seg_start, seg_end, threat: Threat, constraints: FlightConstraints) -> float:
    """Penalty of one segment against one cylinder.

    d is the minimum horizontal distance from the cylinder axis to the
    segment's x-y projection: zero beyond the danger annulus, linear
    inside it, infinite in the collision disc.
    """
    seg = np.vstack([np.asarray(seg_start, dtype=float), np.asarray(seg_end, dtype=float)])
    return float(threat_cost_many(seg[None], [threat], constraints)[0])


def threat_cost(waypoints, threats, constraints: FlightConstraints) -> float:
    """Penalty summed over every segment and every threat."""
    return float(threat_cost_many(_as_paths(waypoints), threats, constraints)[0])


# --- F3: altitude cost -------------------------------------------------------

def altitude_cost_many(paths: np.ndarray, terrain, constraints: FlightConstraints) -> np.ndarray:
    ground = terrain.heights(paths[..., 0], paths[..., 1])  # NaN off-map / nodata
    h = paths[..., 2] - ground
    in_corridor = (h >= constraints.h_min) & (h <= constraints.h_max)
    penalty = np.where(in_corridor, np.abs(h - constraints.corridor_mid), np.inf)
    return penalty.sum(axis=-1)


def altitude_penalty(waypoint, terrain, constraints: FlightConstraints) -> float:
    """Deviation from mid-corridor height above ground, or infinity when the
    waypoint leaves the [h_min, h_max] band (or flies off the map)."""
    p = np.asarray(waypoint, dtype=float).reshape(1, 1, 3)
    return float(altitude_cost_many(p, terrain, constraints)[0])


def altitude_cost(waypoints, terrain, constraints: FlightConstraints) -> float:
    return float(altitude_cost_many(_as_paths(waypoints), terrain, constraints)[0])


# --- F4: smoothness ----------------------------------------------------------

def _turn_angles(paths: np.ndarray) -> np.ndarray:
    """Horizontal turn angle at each interior waypoint, (M, n-2)."""
    dxy = np.diff(paths[..., :2], axis=-2)  # (M, n-1, 2)
    u, v = dxy[:, :-1], dxy[:, 1:]
    cross = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    dot = (u * v).sum(axis=-1)
    ang = np.arctan2(np.abs(cross), dot)
    ok = (np.hypot(u[..., 0], u[..., 1]) > EPS_LEN) & (np.hypot(v[..., 0], v[..., 1]) > EPS_LEN)
    return np.where(ok, ang, 0.0)


def _climb_angles(paths: np.ndarray) -> np.ndarray:
    """Climb angle of each segment, (M, n-1); degenerate segments give 0."""
    steps = np.diff(paths, axis=-2)
    horiz = np.hypot(steps[..., 0], steps[..., 1])
    ang = np.arctan2(steps[..., 2], horiz)
    ok = np.sqrt((steps**2).sum(axis=-1)) > EPS_LEN
    return np.where(ok, ang, 0.0)


def smooth_cost_many(paths: np.ndarray, weights) -> np.ndarray:
    turns = _turn_angles(paths).sum(axis=-1)
    climbs = _climb_angles(paths)
    deltas = np.abs(np.diff(climbs, axis=-1)).sum(axis=-1)
    return weights.a1 * turns + weights.a2 * deltas


def turn_angle(p0, p1, p2) -> float:
    """Angle in [0, pi] between consecutive segments projected on the
    horizontal plane; zero when either projection is degenerate."""
    path = np.vstack([p0, p1, p2]).astype(float)
    return float(_turn_angles(path[None])[0, 0])


def climb_angle(p0, p1) -> float:
    """Angle in [-pi/2, pi/2] between a segment and its horizontal
    projection; vertical segments give +-pi/2, zero-length segments 0."""
    path = np.vstack([p0, p1]).astype(float)
    return float(_climb_angles(path[None])[0, 0])


def smooth_cost(waypoints, weights) -> float:
    """a1 * sum of turn angles + a2 * sum of |climb delta| over consecutive
    segment pairs."""
    return float(smooth_cost_many(_as_paths(waypoints), weights)[0])


# --- total -------------------------------------------------------------------

def cost_components(paths: np.ndarray, scenario: Scenario):
    """(f1, f2, f3, f4) arrays for a stack of paths."""
    f1 = length_cost_many(paths)
    f2 = threat_cost_many(paths, scenario.threats, scenario.constraints)
    f3 = altitude_cost_many(paths, scenario.terrain, scenario.constraints)
    f4 = smooth_cost_many(paths, scenario.weights)
    return f1, f2, f3, f4


def _weighted_total(f1, f2, f3, f4, weights) -> np.ndarray:
    total = np.zeros_like(f1)
    for b, f in ((weights.b1, f1), (weights.b2, f2), (weights.b3, f3), (weights.b4, f4)):
        if b > 0:  # skip zero weights so 0 * inf cannot poison the sum
            total = total + b * f
    return total


def evaluate_paths(paths, scenario: Scenario) -> np.ndarray:
    """Total cost of each path in an (M, n, 3) stack; the optimizer hot path."""
    paths = _as_paths(paths)
    return _weighted_total(*cost_components(paths, scenario), scenario.weights)


def total_cost(waypoints, scenario: Scenario) -> CostBreakdown:
    """Full cost of one path whose endpoints must equal the scenario's."""
    paths = _as_paths(waypoints)
    n = paths.shape[1]
    if n < 3:
        raise ValueError(f"a path needs at least 3 waypoints, got {n}")
    if not (np.array_equal(paths[0, 0], scenario.start) and np.array_equal(paths[0, -1], scenario.goal)):
        raise ValueError("path endpoints do not match the scenario start/goal")
    f1, f2, f3, f4 = cost_components(paths, scenario)
    total = _weighted_total(f1, f2, f3, f4, scenario.weights)
    return CostBreakdown(float(f1[0]), float(f2[0]), float(f3[0]), float(f4[0]), float(total[0]))
