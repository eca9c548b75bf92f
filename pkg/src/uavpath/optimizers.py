"""Population-based path optimizers behind one ``run`` entry point.

Seven algorithms share the same loop skeleton (initialize, iterate a
step function, log the best-so-far fitness per iteration):

* pso       - inertial velocity/position updates on cartesian genomes
* theta_pso - the same algebra on phase-angle genomes
* qpso      - velocity-free sampling around a local attractor
* spso      - inertial updates on spherical motion vectors (azimuth
              differences take the short way around)
* ga        - variable-length waypoint genomes with add/delete/merge
              mutations and one-point crossover
* de        - DE/rand/1/bin with greedy selection
* abc       - employed/onlooker/scout phases over food sources

Fitness is always the scenario's total path cost; infeasible candidates
carry infinite fitness, stay in the population, and are never admitted as
a best while a finite particle exists.  Every stochastic draw flows from
named streams derived from (seed, algorithm, particle index), so traces
are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import encodings
from .cost import evaluate_paths
from .encodings import SearchSpace, assemble_path, clamp_velocity, clamp_wrap, wrap_difference
from .scenario import Scenario

ALGORITHMS = ("pso", "theta_pso", "qpso", "spso", "ga", "de", "abc")

_ENCODING_OF = {
    "pso": "cartesian",
    "theta_pso": "angle",
    "qpso": "cartesian",
    "spso": "spherical",
    "ga": "cartesian",
    "de": "cartesian",
    "abc": "cartesian",
}

INIT_RETRIES = 20  # attempts per particle to find a finite-fitness genome


@dataclass
class SwarmConfig:
    """Shared solver parameters; per-algorithm fields are ignored by the
    algorithms that do not use them."""

    swarm_size: int = 500
    max_iterations: int = 200
    inertia: float = 1.0
    damping: float = 0.98
    cognitive: float = 1.5
    social: float = 1.5
    qpso_beta: tuple[float, float] = (1.0, 0.5)  # linear schedule start -> end
    de_f: float = 0.5
    de_cr: float = 0.9
    abc_limit: int = 50
    ga_crossover_rate: float = 0.8
    ga_mutation_rate: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("de_cr", "ga_crossover_rate", "ga_mutation_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.cognitive < 0 or self.social < 0:
            raise ValueError("cognitive and social coefficients must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass
class EvolutionTrace:
    """Result of one optimization run."""

    algorithm: str
    seed: int
    best_fitness: np.ndarray  # global best after each iteration
    best_genome: np.ndarray
    best_path: np.ndarray
    evaluations: int

    @property
    def final_fitness(self) -> float:
        return float(self.best_fitness[-1])

    @property
    def feasible(self) -> bool:
        """False marks a failed run: no finite-fitness path was ever found."""
        return math.isfinite(self.final_fitness)


def _streams(seed: int, algorithm: str, swarm_size: int):
    """Named RNG streams: one per particle for initialization, one for the
    swarm-level iteration draws."""
    algo_id = ALGORITHMS.index(algorithm)
    particle = [
        np.random.default_rng(np.random.SeedSequence((seed, algo_id, 0, i)))
        for i in range(swarm_size)
    ]
    swarm = np.random.default_rng(np.random.SeedSequence((seed, algo_id, 1)))
    return particle, swarm


# --- PSO family ----------------------------------------------------------------


@dataclass
class Swarm:
    """Vectorized particle state; row i is particle i."""

    kind: str
    scenario: Scenario
    space: SearchSpace
    positions: np.ndarray        # (M, D)
    velocities: np.ndarray | None
    fitness: np.ndarray          # (M,)
    best_positions: np.ndarray   # (M, D) local bests
    best_fitness: np.ndarray     # (M,)
    inertia: float
    iteration: int = 0
    evaluations: int = 0

    def evaluate(self, positions: np.ndarray) -> np.ndarray:
        paths = encodings.decode(self.kind, positions, self.scenario)
        self.evaluations += positions.shape[0]
        return evaluate_paths(paths, self.scenario)

    def update_bests(self) -> None:
        improved = self.fitness < self.best_fitness
        self.best_positions[improved] = self.positions[improved]
        self.best_fitness[improved] = self.fitness[improved]

    def global_best(self) -> tuple[np.ndarray, float]:
        i = int(np.argmin(self.best_fitness))  # lowest index wins ties
        return self.best_positions[i], float(self.best_fitness[i])

    def best(self) -> tuple[float, np.ndarray]:
        genome, fit = self.global_best()
        return fit, genome


def _init_genomes(kind, scenario, streams):
    """Draw one genome per particle, redrawing infeasible ones a bounded
    number of times from the particle's own stream."""
    genomes = np.stack([encodings.random_genome(kind, scenario, rng) for rng in streams])
    paths = encodings.decode(kind, genomes, scenario)
    fitness = evaluate_paths(paths, scenario)
    evaluations = len(streams)
    for _ in range(INIT_RETRIES - 1):
        bad = ~np.isfinite(fitness)
        if not bad.any():
            break
        idx = np.flatnonzero(bad)
        redraw = np.stack([encodings.random_genome(kind, scenario, streams[i]) for i in idx])
        new_fit = evaluate_paths(encodings.decode(kind, redraw, scenario), scenario)
        evaluations += idx.size
        genomes[idx] = redraw
        fitness[idx] = new_fit
    return genomes, fitness, evaluations


def init_swarm(algorithm: str, scenario: Scenario, config: SwarmConfig, particle_streams) -> Swarm:
    kind = _ENCODING_OF[algorithm]
    space = encodings.space_for(kind, scenario)
    positions, fitness, evals = _init_genomes(kind, scenario, particle_streams)
    velocities = None if algorithm == "qpso" else np.zeros_like(positions)
    return Swarm(
        kind=kind,
        scenario=scenario,
        space=space,
        positions=positions,
        velocities=velocities,
        fitness=fitness,
        best_positions=positions.copy(),
        best_fitness=fitness.copy(),
        inertia=config.inertia,
        evaluations=evals,
    )


def _inertial_step(swarm: Swarm, config: SwarmConfig, rng) -> Swarm:
    """Shared velocity/position update for pso, theta_pso and spso."""
    shape = swarm.positions.shape
    r1 = rng.random(shape)
    r2 = rng.random(shape)
    g_best, _ = swarm.global_best()
    to_local = wrap_difference(swarm.best_positions - swarm.positions, swarm.space)
    to_global = wrap_difference(g_best[None, :] - swarm.positions, swarm.space)
    v = (
        swarm.inertia * swarm.velocities
        + config.cognitive * r1 * to_local
        + config.social * r2 * to_global
    )
    swarm.velocities = clamp_velocity(v, swarm.space)
    swarm.positions = clamp_wrap(swarm.positions + swarm.velocities, swarm.space)
    swarm.fitness = swarm.evaluate(swarm.positions)
    swarm.update_bests()
    swarm.inertia *= config.damping
    swarm.iteration += 1
    return swarm


def pso_step(swarm: Swarm, config: SwarmConfig, rng) -> Swarm:
    """v <- w v + eta1 r1 (local - x) + eta2 r2 (global - x); x <- x + v."""
    return _inertial_step(swarm, config, rng)


def theta_pso_step(swarm: Swarm, config: SwarmConfig, rng) -> Swarm:
    """The pso update applied to phase angles, clamped to [-pi/2, pi/2]."""
    return _inertial_step(swarm, config, rng)


def spso_step(swarm: Swarm, config: SwarmConfig, rng) -> Swarm:
    """The pso update applied to (rho, psi, phi) motion vectors; azimuth
    attraction uses the wrapped short-way difference."""
    return _inertial_step(swarm, config, rng)


def qpso_beta(config: SwarmConfig, iteration: int) -> float:
    start, end = config.qpso_beta
    span = max(config.max_iterations - 1, 1)
    return start + (end - start) * min(iteration, span) / span


def qpso_step(swarm: Swarm, config: SwarmConfig, rng) -> Swarm:
    """Sample x around the attractor p = a l + (1-a) g with spread set by
    the distance to the swarm's mean best position."""
    shape = swarm.positions.shape
    beta = qpso_beta(config, swarm.iteration)
    mbest = swarm.best_positions.mean(axis=0)
    a = rng.random(shape)
    u = 1.0 - rng.random(shape)  # (0, 1]: keeps ln(1/u) finite
    sign = np.where(rng.random(shape) < 0.5, 1.0, -1.0)
    g_best, _ = swarm.global_best()
    p = a * swarm.best_positions + (1.0 - a) * g_best[None, :]
    spread = 2.0 * beta * np.abs(mbest[None, :] - swarm.positions)
    swarm.positions = clamp_wrap(p + sign * 0.5 * spread * np.log(1.0 / u), swarm.space)
    swarm.fitness = swarm.evaluate(swarm.positions)
    swarm.update_bests()
    swarm.iteration += 1
    return swarm


# --- GA --------------------------------------------------------------------------


@dataclass
class GaPopulation:
    """Variable-length waypoint genomes; member i is an (k_i, 3) array of
    interior nodes with k_i in [1, 2 * (n - 2)]."""

    scenario: Scenario
    space: SearchSpace
    members: list
    fitness: np.ndarray
    best_genome: np.ndarray
    best_fitness: float
    evaluations: int = 0

    @property
    def max_nodes(self) -> int:
        return 2 * self.scenario.n_interior

    def evaluate_members(self, members) -> np.ndarray:
        """Batch-evaluate a mixed-length population grouped by node count."""
        fitness = np.empty(len(members))
        lengths = np.array([len(m) for m in members])
        for k in np.unique(lengths):
            idx = np.flatnonzero(lengths == k)
            paths = assemble_path(np.stack([members[i] for i in idx]), self.scenario)
            fitness[idx] = evaluate_paths(paths, self.scenario)
            self.evaluations += idx.size
        return fitness

    def best(self) -> tuple[float, np.ndarray]:
        return self.best_fitness, self.best_genome


def _node_bounds(space: SearchSpace) -> tuple[np.ndarray, np.ndarray]:
    return space.lower[:3], space.upper[:3]


def ga_crossover(p1: np.ndarray, p2: np.ndarray, max_nodes: int, rng):
    """One-point crossover at a waypoint boundary; parents with a single
    node pass through unchanged."""
    if len(p1) < 2 or len(p2) < 2:
        return p1.copy(), p2.copy()
    c1 = int(rng.integers(1, len(p1)))
    c2 = int(rng.integers(1, len(p2)))
    child1 = np.vstack([p1[:c1], p2[c2:]])[:max_nodes]
    child2 = np.vstack([p2[:c2], p1[c1:]])[:max_nodes]
    return child1, child2


def ga_mutate(nodes: np.ndarray, scenario: Scenario, space: SearchSpace, rng) -> np.ndarray:
    """Apply one of the three structural mutations, each equally likely;
    a mutation whose length guard fails leaves the genome unchanged."""
    lo, hi = _node_bounds(space)
    op = int(rng.integers(3))
    if op == 0:  # add: midpoint of a random segment of the full path, jittered
        if len(nodes) >= 2 * scenario.n_interior:
            return nodes
        full = assemble_path(nodes, scenario)
        seg = int(rng.integers(len(full) - 1))
        mid = 0.5 * (full[seg] + full[seg + 1]) + rng.normal(0.0, scenario.terrain.cell_size, 3)
        return np.insert(nodes, seg, np.clip(mid, lo, hi), axis=0)
    if op == 1:  # delete a random node, keeping at least one
        if len(nodes) <= 1:
            return nodes
        return np.delete(nodes, int(rng.integers(len(nodes))), axis=0)
    # merge two adjacent nodes into their midpoint
    if len(nodes) < 2:
        return nodes
    i = int(rng.integers(len(nodes) - 1))
    mid = 0.5 * (nodes[i] + nodes[i + 1])
    return np.vstack([nodes[:i], mid[None], nodes[i + 2:]])


def _tournament(fitness: np.ndarray, rng) -> int:
    i, j = rng.integers(len(fitness)), rng.integers(len(fitness))
    return int(i) if fitness[i] <= fitness[j] else int(j)


def ga_step(population: GaPopulation, config: SwarmConfig, scenario: Scenario, rng) -> GaPopulation:
    """Tournament selection, one-point crossover, structural mutation,
    elitism of one."""
    m = len(population.members)
    elite_idx = int(np.argmin(population.fitness))
    new_members = [population.members[elite_idx].copy()]
    while len(new_members) < m:
        p1 = population.members[_tournament(population.fitness, rng)]
        p2 = population.members[_tournament(population.fitness, rng)]
        if rng.random() < config.ga_crossover_rate:
            c1, c2 = ga_crossover(p1, p2, population.max_nodes, rng)
        else:
            c1, c2 = p1.copy(), p2.copy()
        for child in (c1, c2):
            if len(new_members) >= m:
                break
            if rng.random() < config.ga_mutation_rate:
                child = ga_mutate(child, scenario, population.space, rng)
            new_members.append(child)
    fitness = population.evaluate_members(new_members)
    population.members = new_members
    population.fitness = fitness
    i = int(np.argmin(fitness))
    if fitness[i] < population.best_fitness:
        population.best_fitness = float(fitness[i])
        population.best_genome = new_members[i].copy()
    return population


# --- DE ---------------------------------------------------------------------------


@dataclass
class DePopulation:
    scenario: Scenario
    space: SearchSpace
    members: np.ndarray   # (M, D)
    fitness: np.ndarray
    evaluations: int = 0

    def best(self) -> tuple[float, np.ndarray]:
        i = int(np.argmin(self.fitness))
        return float(self.fitness[i]), self.members[i]


def _distinct_indices(m: int, exclude: int, count: int, rng) -> list[int]:
    chosen: list[int] = []
    while len(chosen) < count:
        i = int(rng.integers(m))
        if i != exclude and i not in chosen:
            chosen.append(i)
    return chosen


def de_step(population: DePopulation, config: SwarmConfig, scenario: Scenario, rng) -> DePopulation:
    """DE/rand/1/bin generation with greedy replacement."""
    x = population.members
    m, d = x.shape
    if m < 4:
        raise ValueError("DE needs a population of at least 4")
    trials = np.empty_like(x)
    for i in range(m):
        r1, r2, r3 = _distinct_indices(m, i, 3, rng)
        mutant = x[r1] + config.de_f * (x[r2] - x[r3])
        cross = rng.random(d) < config.de_cr
        cross[int(rng.integers(d))] = True  # at least one mutant dimension
        trials[i] = np.where(cross, mutant, x[i])
    trials = clamp_wrap(trials, population.space)
    paths = assemble_path(trials.reshape(m, -1, 3), scenario)
    trial_fitness = evaluate_paths(paths, scenario)
    population.evaluations += m
    accept = trial_fitness <= population.fitness
    population.members = np.where(accept[:, None], trials, x)
    population.fitness = np.where(accept, trial_fitness, population.fitness)
    return population


# --- ABC --------------------------------------------------------------------------


@dataclass
class AbcColony:
    """Food sources (one per employed bee); onlookers equal employed."""

    scenario: Scenario
    space: SearchSpace
    sources: np.ndarray    # (S, D)
    fitness: np.ndarray
    trials: np.ndarray     # failures since last improvement
    best_genome: np.ndarray
    best_fitness: float
    scout_stream: np.random.Generator
    evaluations: int = 0

    def best(self) -> tuple[float, np.ndarray]:
        return self.best_fitness, self.best_genome


def _abc_candidates(sources: np.ndarray, picks: np.ndarray, rng) -> np.ndarray:
    """One-dimension neighbor moves v = x + phi (x - x_partner)."""
    s, d = sources.shape
    cands = sources[picks].copy()
    for row, i in enumerate(picks):
        j = int(rng.integers(d))
        k = int(rng.integers(s - 1))
        if k >= i:
            k += 1
        phi = rng.uniform(-1.0, 1.0)
        cands[row, j] = sources[i, j] + phi * (sources[i, j] - sources[k, j])
    return cands


def _abc_greedy(colony: AbcColony, picks: np.ndarray, cands: np.ndarray, scenario: Scenario) -> None:
    cands = clamp_wrap(cands, colony.space)
    paths = assemble_path(cands.reshape(len(cands), -1, 3), scenario)
    fitness = evaluate_paths(paths, scenario)
    colony.evaluations += len(cands)
    for row, i in enumerate(picks):
        if fitness[row] < colony.fitness[i]:
            colony.sources[i] = cands[row]
            colony.fitness[i] = fitness[row]
            colony.trials[i] = 0
        else:
            colony.trials[i] += 1


def onlooker_weights(fitness: np.ndarray) -> np.ndarray:
    """Selection probabilities 1 / (1 + f), zero for infinite-cost sources;
    uniform fallback when every source is infinite."""
    w = np.where(np.isfinite(fitness), 1.0 / (1.0 + fitness), 0.0)
    total = w.sum()
    if total <= 0:
        return np.full(len(fitness), 1.0 / len(fitness))
    return w / total


def _scout_phase(colony: AbcColony, config: SwarmConfig, scenario: Scenario) -> None:
    """Retire the most exhausted source, at most one per cycle."""
    worst = int(np.argmax(colony.trials))
    if colony.trials[worst] < config.abc_limit:
        return
    fresh = encodings.random_genome("cartesian", scenario, colony.scout_stream)
    colony.sources[worst] = fresh
    path = assemble_path(fresh.reshape(1, -1, 3), scenario)
    colony.fitness[worst] = float(evaluate_paths(path, scenario)[0])
    colony.evaluations += 1
    colony.trials[worst] = 0
    if colony.fitness[worst] < colony.best_fitness:
        colony.best_fitness = float(colony.fitness[worst])
        colony.best_genome = colony.sources[worst].copy()


def abc_step(colony: AbcColony, config: SwarmConfig, scenario: Scenario, rng) -> AbcColony:
    """Employed, onlooker and scout phases; the best source ever seen is
    retained outside the colony."""
    s = len(colony.sources)
    # Employed bees: one neighbor move per source.
    picks = np.arange(s)
    _abc_greedy(colony, picks, _abc_candidates(colony.sources, picks, rng), scenario)
    # Onlookers: fitness-proportional source choice.
    picks = rng.choice(s, size=s, p=onlooker_weights(colony.fitness))
    _abc_greedy(colony, picks, _abc_candidates(colony.sources, picks, rng), scenario)
    i = int(np.argmin(colony.fitness))
    if colony.fitness[i] < colony.best_fitness:
        colony.best_fitness = float(colony.fitness[i])
        colony.best_genome = colony.sources[i].copy()
    _scout_phase(colony, config, scenario)
    return colony


# --- run loop -----------------------------------------------------------------------


def _init_state(algorithm: str, scenario: Scenario, config: SwarmConfig, particle_streams):
    if algorithm == "ga":
        genomes, fitness, evals = _init_genomes("cartesian", scenario, particle_streams)
        members = [g.reshape(-1, 3) for g in genomes]
        i = int(np.argmin(fitness))
        return GaPopulation(
            scenario=scenario,
            space=encodings.cartesian_space(scenario),
            members=members,
            fitness=fitness,
            best_genome=members[i].copy(),
            best_fitness=float(fitness[i]),
            evaluations=evals,
        )
    if algorithm == "de":
        if config.swarm_size < 4:
            raise ValueError("DE needs swarm_size >= 4")
        genomes, fitness, evals = _init_genomes("cartesian", scenario, particle_streams)
        return DePopulation(
            scenario=scenario,
            space=encodings.cartesian_space(scenario),
            members=genomes,
            fitness=fitness,
            evaluations=evals,
        )
    if algorithm == "abc":
        n_sources = max(2, config.swarm_size // 2)
        genomes, fitness, evals = _init_genomes("cartesian", scenario, particle_streams[:n_sources])
        i = int(np.argmin(fitness))
        scout_seq = np.random.SeedSequence((config.seed, ALGORITHMS.index("abc"), 2))
        return AbcColony(
            scenario=scenario,
            space=encodings.cartesian_space(scenario),
            sources=genomes,
            fitness=fitness,
            trials=np.zeros(n_sources, dtype=int),
            best_genome=genomes[i].copy(),
            best_fitness=float(fitness[i]),
            scout_stream=np.random.default_rng(scout_seq),
            evaluations=evals,
        )
    return init_swarm(algorithm, scenario, config, particle_streams)


_STEP = {
    "pso": pso_step,
    "theta_pso": theta_pso_step,
    "qpso": qpso_step,
    "spso": spso_step,
}


def run(algorithm: str, scenario: Scenario, config: SwarmConfig) -> EvolutionTrace:
    """Execute one full optimization and return its trace.

    Deterministic for a fixed (algorithm, scenario, config.seed).  A trace
    whose final best fitness is infinite marks a failed run (see
    ``EvolutionTrace.feasible``).
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    particle_streams, swarm_stream = _streams(config.seed, algorithm, config.swarm_size)
    state = _init_state(algorithm, scenario, config, particle_streams)
    best_fit, best_genome = state.best()
    best_genome = np.array(best_genome, copy=True)
    trace = np.empty(config.max_iterations)
    for k in range(config.max_iterations):
        if algorithm == "ga":
            state = ga_step(state, config, scenario, swarm_stream)
        elif algorithm == "de":
            state = de_step(state, config, scenario, swarm_stream)
        elif algorithm == "abc":
            state = abc_step(state, config, scenario, swarm_stream)
        else:
            state = _STEP[algorithm](state, config, swarm_stream)
        fit, genome = state.best()
        if fit < best_fit:
            best_fit = fit
            best_genome = np.array(genome, copy=True)
        trace[k] = best_fit
    if algorithm == "ga":
        best_path = assemble_path(best_genome, scenario)
    else:
        best_path = encodings.decode(_ENCODING_OF[algorithm], best_genome, scenario)
    return EvolutionTrace(
        algorithm=algorithm,
        seed=config.seed,
        best_fitness=trace,
        best_genome=best_genome,
        best_path=best_path,
        evaluations=state.evaluations,
    )


def budgeted_config(algorithm: str, config: SwarmConfig) -> SwarmConfig:
    """Benchmark-harness budget rule: DE trades swarm size for iterations
    (1:5) at an equal number of fitness evaluations."""
    if algorithm != "de":
        return config
    budget = config.swarm_size * config.max_iterations
    swarm = max(4, config.swarm_size // 5)
    return replace(config, swarm_size=swarm, max_iterations=max(1, budget // swarm))
