import math

import numpy as np
import pytest

from uavpath import (
    CostWeights,
    FlightConstraints,
    Scenario,
    SwarmConfig,
    Threat,
    run,
)
from uavpath.cost import evaluate_paths
from uavpath.encodings import SearchSpace
from uavpath.optimizers import (
    ALGORITHMS,
    AbcColony,
    DePopulation,
    Swarm,
    _abc_candidates,
    _abc_greedy,
    _scout_phase,
    budgeted_config,
    de_step,
    ga_crossover,
    ga_mutate,
    init_swarm,
    onlooker_weights,
    pso_step,
    qpso_step,
    spso_step,
    theta_pso_step,
    _streams,
)


@pytest.fixture()
def one_node_scenario(flat_terrain):
    return Scenario(
        terrain=flat_terrain,
        threats=(),
        start=[10.0, 10.0, 70.0],
        goal=[90.0, 90.0, 70.0],
        constraints=FlightConstraints(),
        weights=CostWeights(),
        n_waypoints=3,
    )


class OnesRng:
    """Stub generator whose uniform draws are all ones."""

    def random(self, shape=None):
        return np.ones(shape) if shape is not None else 1.0


class ScriptedRng:
    """Returns pre-scripted values for successive draws."""

    def __init__(self, randoms=(), integers=(), normals=None, uniforms=()):
        self._randoms = list(randoms)
        self._integers = list(integers)
        self._normals = normals
        self._uniforms = list(uniforms)

    def random(self, shape=None):
        v = self._randoms.pop(0)
        if shape is None:
            return float(np.asarray(v).ravel()[0])
        return np.broadcast_to(np.asarray(v, dtype=float), shape).copy()

    def integers(self, *args, **kwargs):
        return self._integers.pop(0)

    def normal(self, loc=0.0, scale=1.0, size=None):
        if self._normals is not None:
            return np.asarray(self._normals, dtype=float)
        return np.zeros(size)

    def uniform(self, lo, hi, size=None):
        v = self._uniforms.pop(0)
        if size is None:
            return float(v)
        return np.broadcast_to(np.asarray(v, dtype=float), size).copy()


def stub_swarm(positions, velocities, best_positions, best_fitness, inertia=1.0, wrap=None):
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    d = positions.shape[1]
    space = SearchSpace(
        "cartesian",
        np.full(d, -1e9),
        np.full(d, 1e9),
        np.zeros(d, dtype=bool) if wrap is None else np.asarray(wrap),
    )
    swarm = Swarm(
        kind="cartesian",
        scenario=None,
        space=space,
        positions=positions,
        velocities=np.atleast_2d(np.asarray(velocities, dtype=float)),
        fitness=np.zeros(len(positions)),
        best_positions=np.atleast_2d(np.asarray(best_positions, dtype=float)),
        best_fitness=np.asarray(best_fitness, dtype=float),
        inertia=inertia,
    )
    swarm.evaluate = lambda pos: np.zeros(len(pos))
    return swarm


class TestInertialSteps:
    def test_pso_hand_evaluated_update(self):
        # w=0.5, v=1, x=0, l=2, lg=4, r1=r2=1, eta=1.5 -> v'=9.5, x'=9.5
        swarm = stub_swarm(
            positions=[[0.0], [4.0]],
            velocities=[[1.0], [0.0]],
            best_positions=[[2.0], [4.0]],
            best_fitness=[1.0, 0.0],  # particle 1 holds the global best
            inertia=0.5,
        )
        config = SwarmConfig(swarm_size=2, max_iterations=1, cognitive=1.5, social=1.5)
        pso_step(swarm, config, OnesRng())
        assert swarm.velocities[0, 0] == pytest.approx(9.5)
        assert swarm.positions[0, 0] == pytest.approx(9.5)

    def test_degenerate_coefficients_pure_inertia(self):
        swarm = stub_swarm([[0.0]], [[1.0]], [[5.0]], [0.0], inertia=1.0)
        config = SwarmConfig(swarm_size=2, max_iterations=1, cognitive=0.0, social=0.0)
        pso_step(swarm, config, OnesRng())
        assert swarm.velocities[0, 0] == 1.0
        assert swarm.positions[0, 0] == 1.0

    def test_fixed_point_is_stationary(self):
        swarm = stub_swarm([[3.0]], [[0.0]], [[3.0]], [0.0], inertia=1.0)
        config = SwarmConfig(swarm_size=2, max_iterations=1)
        pso_step(swarm, config, OnesRng())
        assert swarm.positions[0, 0] == 3.0
        assert swarm.velocities[0, 0] == 0.0

    def test_theta_hand_evaluated_update(self):
        # w=1, dtheta=0.1, theta=0, gamma=gamma_g=0, r=0.5 -> dtheta'=0.1
        swarm = stub_swarm([[0.0]], [[0.1]], [[0.0]], [0.0], inertia=1.0)
        config = SwarmConfig(swarm_size=2, max_iterations=1, cognitive=1.5, social=1.5)
        theta_pso_step(swarm, config, ScriptedRng(randoms=[0.5, 0.5]))
        assert swarm.velocities[0, 0] == pytest.approx(0.1)
        assert swarm.positions[0, 0] == pytest.approx(0.1)

    def test_spso_wrapped_short_way(self):
        # phi_u = 0.9pi, phi_q = -0.9pi: attraction wraps to +0.2pi
        swarm = stub_swarm(
            positions=[[0.9 * math.pi]],
            velocities=[[0.0]],
            best_positions=[[-0.9 * math.pi]],
            best_fitness=[0.0],
            inertia=0.0,
            wrap=[True],
        )
        config = SwarmConfig(swarm_size=2, max_iterations=1, cognitive=1.0, social=0.0)
        spso_step(swarm, config, OnesRng())
        assert swarm.velocities[0, 0] == pytest.approx(0.2 * math.pi)
        # position 1.1pi wraps back into (-pi, pi]
        assert swarm.positions[0, 0] == pytest.approx(-0.9 * math.pi)


class TestQpso:
    def test_u_one_lands_on_attractor(self):
        swarm = stub_swarm([[0.0], [10.0]], [[0.0], [0.0]], [[2.0], [4.0]], [1.0, 0.0])
        swarm.velocities = None
        config = SwarmConfig(swarm_size=2, max_iterations=1)
        # a = 0.25, u-draw 0 -> u = 1 -> ln(1/u) = 0, coin irrelevant
        rng = ScriptedRng(randoms=[0.25, 0.0, 0.9])
        qpso_step(swarm, config, rng)
        p = 0.25 * 2.0 + 0.75 * 4.0
        assert swarm.positions[0, 0] == pytest.approx(p)

    def test_collapsed_swarm_stays_at_attractor(self):
        swarm = stub_swarm([[4.0], [4.0]], [[0.0], [0.0]], [[4.0], [4.0]], [0.5, 0.5])
        swarm.velocities = None
        config = SwarmConfig(swarm_size=2, max_iterations=1)
        rng = ScriptedRng(randoms=[0.6, 0.2, 0.1])  # u = 0.8, but spread = 0
        qpso_step(swarm, config, rng)
        assert np.all(swarm.positions == 4.0)

    def test_attractor_endpoint_at_a_one(self):
        swarm = stub_swarm([[0.0], [9.0]], [[0.0], [0.0]], [[2.0], [4.0]], [1.0, 0.0])
        swarm.velocities = None
        config = SwarmConfig(swarm_size=2, max_iterations=1)
        rng = ScriptedRng(randoms=[1.0, 0.0, 0.2])  # a = 1 -> p = local best
        qpso_step(swarm, config, rng)
        assert swarm.positions[0, 0] == pytest.approx(2.0)


class TestStationarity:
    @pytest.mark.parametrize("algorithm", ["pso", "theta_pso", "spso"])
    def test_zero_coefficients_freeze_swarm(self, algorithm, hilly_scenario):
        config = SwarmConfig(
            swarm_size=8, max_iterations=5, cognitive=0.0, social=0.0,
            inertia=1.0, seed=3,
        )
        particle_streams, swarm_stream = _streams(config.seed, algorithm, config.swarm_size)
        swarm = init_swarm(algorithm, hilly_scenario, config, particle_streams)
        initial = swarm.positions.copy()
        step = {"pso": pso_step, "theta_pso": theta_pso_step, "spso": spso_step}[algorithm]
        for _ in range(5):
            step(swarm, config, swarm_stream)
            assert np.array_equal(swarm.positions, initial)
            assert np.all(swarm.velocities == 0.0)


class TestGaOperators:
    def test_merge_makes_midpoint(self, flat_scenario):
        nodes = np.array([[0.0, 0.0, 0.0], [2.0, 2.0, 2.0]])
        space = SearchSpace("cartesian", np.full(3, -1e9), np.full(3, 1e9), np.zeros(3, bool))
        rng = ScriptedRng(integers=[2, 0])  # op=merge, pair index 0
        out = ga_mutate(nodes, flat_scenario, space, rng)
        assert out.shape == (1, 3)
        assert np.array_equal(out[0], [1.0, 1.0, 1.0])

    def test_delete_guard_on_single_node(self, flat_scenario):
        nodes = np.array([[5.0, 5.0, 50.0]])
        space = SearchSpace("cartesian", np.full(3, -1e9), np.full(3, 1e9), np.zeros(3, bool))
        rng = ScriptedRng(integers=[1])  # op=delete
        out = ga_mutate(nodes, flat_scenario, space, rng)
        assert np.array_equal(out, nodes)

    def test_add_inserts_midpoint_with_zero_jitter(self, flat_scenario):
        nodes = np.array([[10.0, 0.0, 0.0]])
        space = SearchSpace("cartesian", np.full(3, -1e9), np.full(3, 1e9), np.zeros(3, bool))
        # full path = [start, node, goal]; segment 0 runs start -> node
        rng = ScriptedRng(integers=[0, 0])  # op=add, segment 0
        out = ga_mutate(nodes, flat_scenario, space, rng)
        assert out.shape == (2, 3)
        mid = 0.5 * (flat_scenario.start + nodes[0])
        assert np.allclose(out[0], mid)

    def test_crossover_at_waypoint_boundary(self):
        p1 = np.arange(12.0).reshape(4, 3)
        p2 = -np.arange(9.0).reshape(3, 3)
        rng = ScriptedRng(integers=[2, 1])
        c1, c2 = ga_crossover(p1, p2, max_nodes=8, rng=rng)
        assert np.array_equal(c1, np.vstack([p1[:2], p2[1:]]))
        assert np.array_equal(c2, np.vstack([p2[:1], p1[2:]]))

    def test_crossover_passthrough_for_single_node(self):
        p1 = np.zeros((1, 3))
        p2 = np.ones((4, 3))
        c1, c2 = ga_crossover(p1, p2, max_nodes=8, rng=ScriptedRng())
        assert np.array_equal(c1, p1) and np.array_equal(c2, p2)


class TestDe:
    def test_zero_difference_vector_and_greedy(self, one_node_scenario):
        optimum = np.array([50.0, 50.0, 70.0])
        bad = np.array([15.0, 85.0, 115.0])
        members = np.vstack([bad, optimum, optimum, optimum])
        space = SearchSpace("cartesian", np.full(3, 0.0), np.full(3, 200.0), np.zeros(3, bool))
        fitness = evaluate_paths(
            np.stack([np.vstack([one_node_scenario.start, m[None], one_node_scenario.goal]) for m in members]),
            one_node_scenario,
        )
        pop = DePopulation(scenario=one_node_scenario, space=space, members=members.copy(), fitness=fitness.copy())
        config = SwarmConfig(swarm_size=4, max_iterations=1, de_cr=1.0, de_f=0.5)
        de_step(pop, config, one_node_scenario, np.random.default_rng(0))
        # target 0's mutant is built from three copies of the optimum, so the
        # trial equals the optimum and greedily replaces the bad member...
        assert np.array_equal(pop.members[0], optimum)
        # ...while the already-optimal members only accept equal-cost trials.
        assert pop.fitness[1:] == pytest.approx(fitness[1:])

    def test_population_too_small(self, one_node_scenario):
        members = np.zeros((3, 3))
        space = SearchSpace("cartesian", np.full(3, 0.0), np.full(3, 200.0), np.zeros(3, bool))
        pop = DePopulation(scenario=one_node_scenario, space=space, members=members, fitness=np.zeros(3))
        with pytest.raises(ValueError, match="at least 4"):
            de_step(pop, SwarmConfig(swarm_size=4, max_iterations=1), one_node_scenario, np.random.default_rng(0))


def make_colony(scenario, sources):
    sources = np.asarray(sources, dtype=float)
    space = SearchSpace("cartesian", np.full(3, 0.0), np.full(3, 200.0), np.zeros(3, bool))
    paths = np.stack([np.vstack([scenario.start, s[None], scenario.goal]) for s in sources])
    fitness = evaluate_paths(paths, scenario)
    i = int(np.argmin(fitness))
    return AbcColony(
        scenario=scenario,
        space=space,
        sources=sources.copy(),
        fitness=fitness.copy(),
        trials=np.zeros(len(sources), dtype=int),
        best_genome=sources[i].copy(),
        best_fitness=float(fitness[i]),
        scout_stream=np.random.default_rng(5),
    )


class TestAbc:
    def test_null_move_increments_trial(self, one_node_scenario):
        colony = make_colony(one_node_scenario, [[50.0, 50.0, 70.0], [60.0, 60.0, 75.0]])
        picks = np.array([0])
        rng = ScriptedRng(integers=[1, 0], uniforms=[0.0])  # dim 1, partner 1, phi=0
        cands = _abc_candidates(colony.sources, picks, rng)
        assert np.array_equal(cands[0], colony.sources[0])
        _abc_greedy(colony, picks, cands, one_node_scenario)
        assert colony.trials[0] == 1
        assert colony.trials[1] == 0

    def test_onlooker_weights_degenerate(self):
        w = onlooker_weights(np.array([math.inf, 5.0, math.inf]))
        assert w == pytest.approx([0.0, 1.0, 0.0])
        uniform = onlooker_weights(np.array([math.inf, math.inf]))
        assert uniform == pytest.approx([0.5, 0.5])

    def test_scout_replaces_exhausted_source(self, one_node_scenario):
        colony = make_colony(one_node_scenario, [[50.0, 50.0, 70.0], [60.0, 60.0, 75.0]])
        before = colony.sources[1].copy()
        colony.trials[:] = [0, 50]
        _scout_phase(colony, SwarmConfig(swarm_size=4, max_iterations=1, abc_limit=50), one_node_scenario)
        assert colony.trials[1] == 0
        assert not np.array_equal(colony.sources[1], before)

    def test_scout_leaves_fresh_sources(self, one_node_scenario):
        colony = make_colony(one_node_scenario, [[50.0, 50.0, 70.0], [60.0, 60.0, 75.0]])
        before = colony.sources.copy()
        colony.trials[:] = [3, 7]
        _scout_phase(colony, SwarmConfig(swarm_size=4, max_iterations=1, abc_limit=50), one_node_scenario)
        assert np.array_equal(colony.sources, before)


class TestRun:
    def test_unknown_algorithm(self, flat_scenario):
        with pytest.raises(ValueError, match="unknown algorithm"):
            run("simulated_annealing", flat_scenario, SwarmConfig(swarm_size=4, max_iterations=1))

    @pytest.mark.parametrize("algorithm", ALGORITHMS)
    def test_deterministic_traces(self, algorithm, hilly_scenario):
        config = SwarmConfig(swarm_size=10, max_iterations=8, seed=21)
        a = run(algorithm, hilly_scenario, config)
        b = run(algorithm, hilly_scenario, config)
        assert np.array_equal(a.best_fitness, b.best_fitness)
        assert np.array_equal(a.best_path, b.best_path)
        assert a.evaluations == b.evaluations

    @pytest.mark.parametrize("algorithm", ALGORITHMS)
    def test_trace_monotone_and_consistent(self, algorithm, hilly_scenario):
        config = SwarmConfig(swarm_size=12, max_iterations=15, seed=4)
        trace = run(algorithm, hilly_scenario, config)
        assert len(trace.best_fitness) == config.max_iterations
        assert not np.any(trace.best_fitness[1:] > trace.best_fitness[:-1])
        assert trace.final_fitness == trace.best_fitness[-1]
        assert trace.best_path.shape[1] == 3
        assert np.array_equal(trace.best_path[0], hilly_scenario.start)
        assert np.array_equal(trace.best_path[-1], hilly_scenario.goal)

    def test_local_bests_never_increase(self, hilly_scenario):
        config = SwarmConfig(swarm_size=10, max_iterations=1, seed=9)
        particle_streams, swarm_stream = _streams(config.seed, "spso", config.swarm_size)
        swarm = init_swarm("spso", hilly_scenario, config, particle_streams)
        prev = swarm.best_fitness.copy()
        for _ in range(25):
            spso_step(swarm, config, swarm_stream)
            assert np.all(swarm.best_fitness <= prev)
            prev = swarm.best_fitness.copy()

    def test_impossible_scenario_reports_failure(self, flat_terrain):
        # a tight ring of overlapping cylinders walls off the goal
        ring = tuple(
            Threat(50.0 + 25.0 * math.cos(a), 50.0 + 25.0 * math.sin(a), 12.0)
            for a in np.linspace(0.0, 2.0 * math.pi, 10, endpoint=False)
        )
        scenario = Scenario(
            terrain=flat_terrain,
            threats=ring,
            start=[10.0, 10.0, 70.0],
            goal=[50.0, 50.0, 70.0],
            constraints=FlightConstraints(),
            weights=CostWeights(),
            n_waypoints=5,
        )
        trace = run("pso", scenario, SwarmConfig(swarm_size=10, max_iterations=5, seed=0))
        assert not trace.feasible
        assert math.isinf(trace.final_fitness)
        assert np.all(np.isinf(trace.best_fitness))

    def test_flat_scenario_reaches_analytic_optimum(self, flat_scenario):
        direct = float(np.linalg.norm(flat_scenario.goal - flat_scenario.start))
        for algorithm in ("spso", "pso"):
            trace = run(algorithm, flat_scenario, SwarmConfig(swarm_size=60, max_iterations=80, seed=2))
            assert trace.feasible
            assert trace.final_fitness <= 1.05 * direct

    @pytest.mark.parametrize("algorithm", ALGORITHMS)
    def test_positions_respect_bounds(self, algorithm, hilly_scenario):
        config = SwarmConfig(swarm_size=8, max_iterations=6, seed=13)
        trace = run(algorithm, hilly_scenario, config)
        x_min, x_max, y_min, y_max = hilly_scenario.terrain.bounds
        interior = trace.best_path[1:-1]
        if algorithm == "spso":
            # chained decode is not box-bounded; just sanity-check shape
            assert interior.shape[1] == 3
        else:
            assert np.all(interior[:, 0] >= x_min - 1e-9)
            assert np.all(interior[:, 0] <= x_max + 1e-9)
            assert np.all(interior[:, 1] >= y_min - 1e-9)
            assert np.all(interior[:, 1] <= y_max + 1e-9)


class TestBudget:
    def test_de_budget_rule(self):
        base = SwarmConfig(swarm_size=100, max_iterations=100)
        de = budgeted_config("de", base)
        assert de.swarm_size == 20
        assert de.max_iterations == 500
        assert de.swarm_size * de.max_iterations == base.swarm_size * base.max_iterations
        assert budgeted_config("pso", base) is base

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SwarmConfig(swarm_size=1, max_iterations=10)
        with pytest.raises(ValueError):
            SwarmConfig(swarm_size=10, max_iterations=0)
        with pytest.raises(ValueError):
            SwarmConfig(swarm_size=10, max_iterations=10, de_cr=1.5)
        with pytest.raises(ValueError):
            SwarmConfig(swarm_size=10, max_iterations=10, seed=-1)

    @pytest.mark.parametrize("algorithm", ALGORITHMS)
    def test_evaluation_budget_bookkeeping(self, algorithm, hilly_scenario):
        m, iters = 10, 12
        trace = run(algorithm, hilly_scenario, SwarmConfig(swarm_size=m, max_iterations=iters, seed=6))
        # every algorithm consumes about m evaluations per iteration plus
        # initialization (with up to 20 retries per particle)
        assert trace.evaluations >= (m // 2) * (iters + 1)
        assert trace.evaluations <= m * (iters + 25)
