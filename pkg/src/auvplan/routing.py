"""Route optimization over the mission graph.

Four population metaheuristics search for the simple path that maximizes
collected task weight while keeping the traversal time under a hard budget.
Ant colony optimization walks the graph directly; the other three evolve
per-vertex priority vectors and share one decoder, so any of them can
represent any simple path. A route at or over the time budget is treated as
dead on arrival: it can never become the incumbent best.

The best-so-far route cost is non-increasing across iterations for every
algorithm; the per-iteration history makes that auditable from the outside.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .graph import Feasibility, MissionGraph, check_feasibility, decode_priority_vector

PHEROMONE_FLOOR = 1e-12
PRIORITY_RANGE = (0.0, 100.0)


class RouteAlgorithm(str, Enum):
    ACO = "aco"
    BBO = "bbo"
    GA = "ga"
    PSO = "pso"


class DeadEndError(RuntimeError):
    """An ant has no unvisited neighbor to move to."""


class NoFeasibleRouteError(RuntimeError):
    """The whole run produced no route under the time budget."""


@dataclass
class AcoParams:
    alpha: float = 1.0          # pheromone exponent
    beta: float = 2.0           # heuristic exponent
    evaporation: float = 0.1
    deposit: float = 1.0        # numerator of the best-route deposit
    exponent_decay: float = 0.99
    decay_enabled: bool = True  # shrink alpha and beta every iteration


@dataclass
class BboRouteParams:
    immigration: float = 1.0
    emigration: float = 1.0
    mutation_max: float = 0.1
    elites: int = 2


@dataclass
class GaParams:
    crossover_mix: float = 0.5
    mutation_rate: float = 0.3
    elites: int = 2
    stall_limit: int = 50


@dataclass
class PsoRouteParams:
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    velocity_bound: float = 100.0


@dataclass
class RoutingConfig:
    algorithm: RouteAlgorithm = RouteAlgorithm.ACO
    population: int = 30
    iterations: int = 100
    time_budget_s: float = 34200.0
    time_coeff: float = 1.0
    weight_coeff: float = 1.0
    seed: int = 0
    aco: AcoParams = field(default_factory=AcoParams)
    bbo: BboRouteParams = field(default_factory=BboRouteParams)
    ga: GaParams = field(default_factory=GaParams)
    pso: PsoRouteParams = field(default_factory=PsoRouteParams)

    def __post_init__(self):
        self.algorithm = RouteAlgorithm(self.algorithm)
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.time_budget_s <= 0.0:
            raise ValueError("time_budget_s must be positive")


@dataclass(frozen=True)
class RouteEvaluation:
    """Cost breakdown of one route against a time budget."""

    time_s: float
    total_weight: float
    cost: float
    time_violation_s: float
    over_budget: bool


@dataclass
class RoutingResult:
    route: tuple[int, ...]
    evaluation: RouteEvaluation
    compute_seconds: float
    history: list[tuple[int, float, float, float]]

    def write_history_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,best_cost,best_time_s,best_weight\n")
            for it, cost, t, w in self.history:
                fh.write(f"{it},{cost!r},{t!r},{w!r}\n")


def route_time(graph: MissionGraph, route) -> float:
    """Sum of edge traversal times along a feasible route. Start==dest gives 0."""
    route = tuple(route)
    if len(route) == 1 and route[0] == graph.start == graph.dest:
        return 0.0
    verdict = check_feasibility(graph, route)
    if verdict != Feasibility.FEASIBLE:
        raise ValueError(f"route is not feasible: {verdict.name}")
    return _route_time_unchecked(graph, route)


def _route_time_unchecked(graph, route):
    edges = graph.edges
    total = 0.0
    for a, b in zip(route[:-1], route[1:]):
        total += edges[(a, b) if a < b else (b, a)].time
    return total


def _route_weight_unchecked(graph, route):
    edges = graph.edges
    total = 0.0
    for a, b in zip(route[:-1], route[1:]):
        total += edges[(a, b) if a < b else (b, a)].weight
    return total


def route_cost(
    graph: MissionGraph,
    route,
    time_budget_s: float,
    time_coeff: float = 1.0,
    weight_coeff: float = 1.0,
) -> RouteEvaluation:
    """Cost of a feasible route: time deviation from budget plus inverse weight.

    cost = time_coeff * |T - budget| / budget + weight_coeff / total_weight.
    Routes with T at or over the budget keep their finite formula cost but are
    flagged over_budget; solvers treat that flag as a knock-out.
    """
    route = tuple(route)
    verdict = check_feasibility(graph, route)
    if verdict != Feasibility.FEASIBLE:
        raise ValueError(f"route is not feasible: {verdict.name}")
    return _route_eval_unchecked(graph, route, time_budget_s, time_coeff, weight_coeff)


def _route_eval_unchecked(graph, route, budget, time_coeff, weight_coeff):
    t = _route_time_unchecked(graph, route)
    w = _route_weight_unchecked(graph, route)
    cost = time_coeff * abs(t - budget) / budget + weight_coeff / w
    return RouteEvaluation(
        time_s=t,
        total_weight=w,
        cost=cost,
        time_violation_s=max(0.0, t - budget),
        over_budget=t >= budget,
    )


# ---------------------------------------------------------------------------
# ant colony primitives

def aco_transition_prob(params: AcoParams, tau_row, eta_row, neighborhood):
    """Move probabilities over a pheromone/heuristic row.

    p_j = tau_j^alpha * eta_j^beta normalized over the neighborhood; entries
    outside the neighborhood are zero. Raises DeadEndError when the
    neighborhood is empty.
    """
    tau_row = np.asarray(tau_row, dtype=float)
    eta_row = np.asarray(eta_row, dtype=float)
    neighborhood = list(neighborhood)
    if not neighborhood:
        raise DeadEndError("ant has no remaining moves")
    probs = np.zeros(tau_row.shape[0])
    weights = tau_row[neighborhood] ** params.alpha * eta_row[neighborhood] ** params.beta
    total = weights.sum()
    if total <= 0.0:
        probs[neighborhood] = 1.0 / len(neighborhood)
    else:
        probs[neighborhood] = weights / total
    return probs


def aco_update_pheromone(params: AcoParams, trails: dict, best_route, best_cost: float):
    """Evaporate every trail, then reinforce the best route's edges.

    All trails decay by (1 - evaporation); edges on the best route gain
    deposit / best_cost on top. Values are floored at 1e-12 so no edge ever
    becomes permanently unreachable.
    """
    if best_route is not None and best_cost <= 0.0:
        raise ValueError("best_cost must be positive when depositing")
    keep = 1.0 - params.evaporation
    best_edges = set()
    if best_route is not None:
        for a, b in zip(best_route[:-1], best_route[1:]):
            best_edges.add((a, b) if a < b else (b, a))
    out = {}
    for key, tau in trails.items():
        tau = tau * keep
        if key in best_edges:
            tau += params.deposit / best_cost
        out[key] = max(tau, PHEROMONE_FLOOR)
    return out


def _construct_ant_route(graph, trails, alpha, beta, params, rng):
    """Walk from start toward dest by pheromone-weighted greedy sampling.

    Returns the route, or None when the ant hits a dead end (discarded).
    """
    edges = graph.edges
    cur = graph.start
    visited = {cur}
    route = [cur]
    while cur != graph.dest:
        cands = [n for n in graph.neighbors(cur) if n not in visited]
        if not cands:
            return None
        weights = []
        for n in cands:
            e = edges[(cur, n) if cur < n else (n, cur)]
            tau = trails[(e.u, e.v)]
            eta = e.weight / e.time
            weights.append(math.pow(tau, alpha) * math.pow(eta, beta))
        total = sum(weights)
        if total <= 0.0:
            pick = cands[int(rng.integers(len(cands)))]
        else:
            r = rng.random() * total
            acc = 0.0
            pick = cands[-1]
            for n, w in zip(cands, weights):
                acc += w
                if r <= acc:
                    pick = n
                    break
        visited.add(pick)
        route.append(pick)
        cur = pick
    return tuple(route)


# ---------------------------------------------------------------------------
# biogeography primitives (shared with the path planner)

def bbo_rates(species: float, species_max: float, immigration: float, emigration: float):
    """Immigration and emigration rates for a habitat with the given species count.

    lambda = I * (1 - S / S_max), mu = E * S / S_max. With E == I the two
    rates sum to E exactly for every S.
    """
    if species_max <= 0:
        raise ValueError("species_max must be positive")
    lam = immigration * (1.0 - species / species_max)
    mu = emigration * species / species_max
    return lam, mu


def bbo_species_probabilities(species_max: int, immigration: float, emigration: float):
    """Steady-state probability of each species count 0..species_max.

    Solves the birth-death balance P_{S+1} = P_S * lambda_S / mu_{S+1} and
    normalizes. Used to scale mutation toward improbable habitats.
    """
    probs = np.empty(species_max + 1)
    probs[0] = 1.0
    for s in range(species_max):
        lam, _ = bbo_rates(s, species_max, immigration, emigration)
        _, mu_next = bbo_rates(s + 1, species_max, immigration, emigration)
        probs[s + 1] = probs[s] * lam / mu_next
    probs /= probs.sum()
    return probs


def bbo_mutation_rate(p_s: float, p_max: float, m_max: float) -> float:
    """Mutation rate m_max * (1 - P_S / P_max), clamped into [0, m_max]."""
    if p_max <= 0.0:
        raise ValueError("p_max must be positive")
    return float(np.clip(m_max * (1.0 - p_s / p_max), 0.0, m_max))


def _bbo_generation(vectors, params, rng, resample):
    """One migration + mutation sweep over habitat vectors.

    vectors must be sorted best-first. Returns the next generation with the
    top `elites` habitats carried over unchanged.
    """
    pop, dim = vectors.shape
    s_max = pop - 1
    species = s_max - np.arange(pop)  # best habitat hosts the most species
    lam = np.empty(pop)
    mu = np.empty(pop)
    for i in range(pop):
        lam[i], mu[i] = bbo_rates(species[i], s_max, params.immigration, params.emigration)
    probs = bbo_species_probabilities(s_max, params.immigration, params.emigration)
    p_of = probs[species]
    p_max = float(probs.max())

    nxt = vectors.copy()
    for i in range(pop):
        donor_cum = np.cumsum(np.where(np.arange(pop) == i, 0.0, mu))
        immigrate = rng.random(dim) < lam[i]
        for d in np.nonzero(immigrate)[0]:
            if donor_cum[-1] <= 0.0:
                continue
            j = int(np.searchsorted(donor_cum, rng.random() * donor_cum[-1], side="right"))
            nxt[i, d] = vectors[min(j, pop - 1), d]
        m_rate = bbo_mutation_rate(p_of[i], p_max, params.mutation_max)
        mutate = rng.random(dim) < m_rate
        for d in np.nonzero(mutate)[0]:
            nxt[i, d] = resample(rng, d)
    elites = max(0, min(params.elites, pop))
    nxt[:elites] = vectors[:elites]
    return nxt


# ---------------------------------------------------------------------------
# particle swarm primitive

@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray


def pso_update(params, particle: Particle, p_best, g_best, rng) -> Particle:
    """Velocity-position update with componentwise random pulls.

    v' = w*v + c1*r1*(p_best - x) + c2*r2*(g_best - x), r1, r2 ~ U(0,1) per
    component; v' is clamped to +-velocity_bound before the position step.
    """
    r1 = rng.random(particle.position.shape[0])
    r2 = rng.random(particle.position.shape[0])
    vel = (
        params.inertia * particle.velocity
        + params.cognitive * r1 * (p_best - particle.position)
        + params.social * r2 * (g_best - particle.position)
    )
    vel = np.clip(vel, -params.velocity_bound, params.velocity_bound)
    return Particle(particle.position + vel, vel)


# ---------------------------------------------------------------------------
# genetic primitives

def swap_mutation(vector, i: int, j: int):
    out = np.array(vector, dtype=float)
    out[i], out[j] = out[j], out[i]
    return out


def inversion_mutation(vector, i: int, j: int):
    """Reverse the gene block between i and j inclusive."""
    if i > j:
        i, j = j, i
    out = np.array(vector, dtype=float)
    out[i : j + 1] = out[i : j + 1][::-1]
    return out


def insertion_mutation(vector, i: int, j: int):
    """Remove the gene at i and reinsert it at position j."""
    out = np.array(vector, dtype=float)
    gene = out[i]
    out = np.delete(out, i)
    return np.insert(out, j, gene)


def _interior_span(length: int):
    """Index range eligible for mutation: everything but the first and last
    gene, widened to all-but-first when the vector is too short to have a
    two-gene strict interior."""
    if length >= 4:
        return 1, length - 2
    if length >= 3:
        return 1, length - 1
    return None


def uniform_crossover(parent_a, parent_b, mix: float, rng):
    """Per-gene coin flip at the given mix ratio toward parent_a."""
    mask = rng.random(parent_a.shape[0]) < mix
    return np.where(mask, parent_a, parent_b)


def ga_step(params: GaParams, population, evaluate, rng):
    """One elitist generation over priority-vector individuals.

    population is a list of (vector, penalized_cost) pairs. Parents are
    drawn by roulette on fitness 1 / cost, children are built by uniform
    crossover and occasionally mutated by one of insertion, inversion or
    swap on interior genes, and survivors are the best of parents plus
    children, so the incumbent best can never be lost.
    """
    pop = len(population)
    costs = np.array([c for _, c in population])
    fitness = np.where(np.isfinite(costs), 1.0 / costs, 0.0)
    total = fitness.sum()
    if total <= 0.0:
        probs = np.full(pop, 1.0 / pop)
    else:
        probs = fitness / total

    children = []
    for _ in range(pop):
        ia = int(rng.choice(pop, p=probs))
        ib = int(rng.choice(pop, p=probs))
        child = uniform_crossover(population[ia][0], population[ib][0],
                                  params.crossover_mix, rng)
        if rng.random() < params.mutation_rate:
            span = _interior_span(child.shape[0])
            if span is not None:
                lo, hi = span
                i = int(rng.integers(lo, hi + 1))
                j = int(rng.integers(lo, hi + 1))
                if i != j:
                    op = int(rng.integers(3))
                    if op == 0:
                        child = insertion_mutation(child, i, j)
                    elif op == 1:
                        child = inversion_mutation(child, i, j)
                    else:
                        child = swap_mutation(child, i, j)
        children.append((np.asarray(child, dtype=float), evaluate(child)))

    merged = list(population) + children
    merged.sort(key=lambda item: item[1])
    return merged[:pop]


# ---------------------------------------------------------------------------
# solver front door

def plan_route(graph: MissionGraph, config: RoutingConfig) -> RoutingResult:
    """Search for the best route under the configured time budget.

    Dispatches to the configured algorithm, logs the best-so-far evaluation
    once per iteration and raises NoFeasibleRouteError when nothing under
    the budget was ever seen.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    best: tuple[float, tuple[int, ...], RouteEvaluation] | None = None
    history: list[tuple[int, float, float, float]] = []

    def consider(route, evaluation):
        nonlocal best
        if evaluation.over_budget:
            return math.inf
        if best is None or evaluation.cost < best[0]:
            best = (evaluation.cost, route, evaluation)
        return evaluation.cost

    def evaluate_route(route):
        return _route_eval_unchecked(
            graph, route, config.time_budget_s, config.time_coeff, config.weight_coeff
        )

    def log(iteration):
        if best is None:
            history.append((iteration, math.nan, math.nan, math.nan))
        else:
            ev = best[2]
            history.append((iteration, ev.cost, ev.time_s, ev.total_weight))

    if config.algorithm == RouteAlgorithm.ACO:
        _run_aco(graph, config, rng, consider, evaluate_route, log)
    else:
        _run_priority_solver(graph, config, rng, consider, evaluate_route, log)

    elapsed = time.perf_counter() - started
    if best is None:
        raise NoFeasibleRouteError(
            f"no route under budget {config.time_budget_s} s "
            f"after {config.iterations} iterations"
        )
    return RoutingResult(best[1], best[2], elapsed, history)


def _run_aco(graph, config, rng, consider, evaluate_route, log):
    params = config.aco
    trails = {key: 1.0 for key in graph.edges}
    alpha, beta = params.alpha, params.beta
    best_route, best_cost = None, math.inf
    for it in range(config.iterations):
        for _ in range(config.population):
            route = _construct_ant_route(graph, trails, alpha, beta, params, rng)
            if route is None:
                continue  # dead-ended ant is discarded
            penalized = consider(route, evaluate_route(route))
            if penalized < best_cost:
                best_cost, best_route = penalized, route
        trails = aco_update_pheromone(
            params, trails, best_route, best_cost if best_route else 1.0
        )
        if params.decay_enabled:
            alpha *= params.exponent_decay
            beta *= params.exponent_decay
        log(it)


def _run_priority_solver(graph, config, rng, consider, evaluate_route, log):
    dim = graph.node_count
    lo, hi = PRIORITY_RANGE

    def evaluate_vector(vec):
        route = decode_priority_vector(graph, vec)
        if route is None:
            return math.inf
        return consider(route, evaluate_route(route))

    vectors = rng.uniform(lo, hi, size=(config.population, dim))
    costs = np.array([evaluate_vector(v) for v in vectors])

    if config.algorithm == RouteAlgorithm.GA:
        params = config.ga
        population = sorted(
            ((vectors[i].copy(), float(costs[i])) for i in range(config.population)),
            key=lambda item: item[1],
        )
        stall = 0
        last_best = population[0][1]
        for it in range(config.iterations):
            population = ga_step(params, population, evaluate_vector, rng)
            log(it)
            if population[0][1] < last_best:
                last_best = population[0][1]
                stall = 0
            else:
                stall += 1
                if stall >= params.stall_limit:
                    break

    elif config.algorithm == RouteAlgorithm.PSO:
        params = config.pso
        particles = [
            Particle(vectors[i].copy(),
                     rng.uniform(-params.velocity_bound, params.velocity_bound, size=dim))
            for i in range(config.population)
        ]
        p_best = [vectors[i].copy() for i in range(config.population)]
        p_cost = costs.copy()
        g_idx = int(np.argmin(p_cost))
        g_best, g_cost = p_best[g_idx].copy(), float(p_cost[g_idx])
        for it in range(config.iterations):
            for i, particle in enumerate(particles):
                particles[i] = pso_update(params, particle, p_best[i], g_best, rng)
                c = evaluate_vector(particles[i].position)
                if c < p_cost[i]:
                    p_cost[i] = c
                    p_best[i] = particles[i].position.copy()
                    if c < g_cost:
                        g_cost = c
                        g_best = particles[i].position.copy()
            log(it)

    elif config.algorithm == RouteAlgorithm.BBO:
        params = config.bbo
        order = np.argsort(costs, kind="stable")
        vectors = vectors[order]
        costs = costs[order]

        def resample(r, _dim):
            return r.uniform(lo, hi)

        for it in range(config.iterations):
            vectors = _bbo_generation(vectors, params, rng, resample)
            costs = np.array([evaluate_vector(v) for v in vectors])
            order = np.argsort(costs, kind="stable")
            vectors = vectors[order]
            costs = costs[order]
            log(it)

    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unsupported algorithm {config.algorithm}")
