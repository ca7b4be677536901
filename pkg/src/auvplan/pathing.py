"""Online path planning between consecutive waypoints.

A candidate path is a clamped uniform B-spline through a small set of
interior control points boxed inside a corridor around the leg. Sampling
the spline yields timestamped vehicle states; penalties accrue for depth,
surge, sway and yaw-rate excursions and a single binary flag marks any
contact with non-water cells or predicted obstacle envelopes. Four
population methods (differential evolution, firefly, biogeography,
particle swarm) search the flattened control-point coordinates for the
cheapest compliant path.

Flight time is computed against the active current by default: each arc
element is divided by the along-track ground speed, so favorable swirls
genuinely shorten the leg and adverse ones stretch it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .environment import CellClass, CurrentField, TerrainGrid, obstacle_region_at
from .routing import Particle, bbo_mutation_rate, bbo_rates, bbo_species_probabilities, pso_update

MIN_GROUND_SPEED = 0.1      # m/s floor when fighting a strong counter-current
ENDPOINT_TOL = 1e-6         # m, spline ends must interpolate the leg endpoints
DEFAULT_CRUISE_SPEED = 2.57


class PathAlgorithm(str, Enum):
    DE = "de"
    FA = "fa"
    BBO = "bbo"
    PSO = "pso"


@dataclass
class DeParams:
    scale: float = 0.6            # differential weight F
    crossover_rate: float = 0.9
    donor_mix: bool = True        # blend the base vector from the whole triplet

    def __post_init__(self):
        if self.scale < 0.0:
            raise ValueError("scale must be non-negative")
        if not (0.0 <= self.crossover_rate <= 1.0):
            raise ValueError("crossover_rate must be in [0, 1]")


@dataclass
class FaParams:
    attractiveness: float = 1.0   # beta_0 at zero distance
    absorption: float = 1.0       # gamma against corridor-normalized distance
    noise: float = 0.25           # alpha_0, fraction of corridor width
    damping: float = 0.97         # alpha decays by this factor per iteration


@dataclass
class PathBboParams:
    immigration: float = 1.0
    emigration: float = 1.0
    mutation_max: float = 0.05
    elites: int = 2


@dataclass
class PathPsoParams:
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    velocity_fraction: float = 0.25  # velocity clamp as a fraction of corridor width


@dataclass
class VehicleLimits:
    surge_max: float = 4.0
    sway_max: float = 2.0
    yaw_rate_max: float = 0.3
    depth_min: float = 0.0
    depth_max: float = 100.0

    def __post_init__(self):
        if self.surge_max <= 0 or self.sway_max <= 0 or self.yaw_rate_max <= 0:
            raise ValueError("kinodynamic limits must be positive")
        if not (0.0 <= self.depth_min < self.depth_max):
            raise ValueError("need 0 <= depth_min < depth_max")


@dataclass
class ViolationWeights:
    """Per-term multipliers applied when violations enter the path cost."""

    depth_shallow: float = 1.0
    depth_deep: float = 1.0
    surge: float = 1.0
    sway: float = 1.0
    yaw_rate: float = 1.0
    collision: float = 1.0


@dataclass
class PathConfig:
    algorithm: PathAlgorithm = PathAlgorithm.DE
    interior_points: int = 5
    population: int = 20
    iterations: int = 80
    samples: int | None = None     # default max(200, 20 * interior_points)
    cruise_speed: float = DEFAULT_CRUISE_SPEED
    current_aware_time: bool = True
    corridor_margin: float = 0.25  # inflation per axis, fraction of leg length
    warm_fraction: float = 0.5
    penalty_scale: float = 1000.0  # Q
    limits: VehicleLimits = field(default_factory=VehicleLimits)
    weights: ViolationWeights = field(default_factory=ViolationWeights)
    seed: int = 0
    de: DeParams = field(default_factory=DeParams)
    fa: FaParams = field(default_factory=FaParams)
    bbo: PathBboParams = field(default_factory=PathBboParams)
    pso: PathPsoParams = field(default_factory=PathPsoParams)

    def __post_init__(self):
        self.algorithm = PathAlgorithm(self.algorithm)
        if self.interior_points < 1:
            raise ValueError("need at least one interior control point")
        if self.population < 4:
            raise ValueError("population must be at least 4")
        if self.sample_count < 2 * self.interior_points:
            raise ValueError("samples must be at least twice the interior point count")
        if self.cruise_speed <= 0.0:
            raise ValueError("cruise_speed must be positive")

    @property
    def sample_count(self) -> int:
        if self.samples is not None:
            return self.samples
        return max(200, 20 * self.interior_points)


@dataclass(frozen=True)
class ControlPolygon:
    """Spline control points with the corridor box they must stay inside."""

    points: np.ndarray          # (n, 3), first and last are the leg endpoints
    lower: np.ndarray           # (3,) corridor lower corner
    upper: np.ndarray           # (3,) corridor upper corner

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise ValueError("control polygon needs at least two 3-D points")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))

    @property
    def interior(self) -> np.ndarray:
        return self.points[1:-1]


@dataclass
class ViolationBreakdown:
    """Raw per-term violation totals; weights are applied at costing time."""

    depth_shallow: float = 0.0
    depth_deep: float = 0.0
    surge: float = 0.0
    sway: float = 0.0
    yaw_rate: float = 0.0
    collision: int = 0

    def weighted(self, weights: ViolationWeights) -> dict[str, float]:
        return {
            "depth_shallow": weights.depth_shallow * self.depth_shallow,
            "depth_deep": weights.depth_deep * self.depth_deep,
            "surge": weights.surge * self.surge,
            "sway": weights.sway * self.sway,
            "yaw_rate": weights.yaw_rate * self.yaw_rate,
            "collision": weights.collision * self.collision,
        }

    def weighted_total(self, weights: ViolationWeights) -> float:
        return sum(self.weighted(weights).values())

    def clean(self) -> bool:
        return (self.collision == 0 and self.depth_shallow == 0.0
                and self.depth_deep == 0.0 and self.surge == 0.0
                and self.sway == 0.0 and self.yaw_rate == 0.0)


@dataclass
class PathCandidate:
    """Sampled spline with timestamps and vehicle states.

    states columns: x, y, z, yaw, pitch, u, v, w. Yaw and pitch come from
    finite differences between consecutive samples; u, v, w combine cruise
    speed along the local heading with the ambient current.
    """

    times: np.ndarray           # (M,) seconds from leg start
    states: np.ndarray          # (M, 8)
    arc_length: float
    flight_time: float
    polygon: ControlPolygon
    cost: float | None = None
    violations: ViolationBreakdown | None = None

    def write_trajectory_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,x,y,z,yaw,pitch,u,v,w\n")
            for t, row in zip(self.times, self.states):
                cells = ",".join(repr(float(c)) for c in row)
                fh.write(f"{float(t)!r},{cells}\n")


@dataclass
class PathResult:
    path: PathCandidate
    polygon: ControlPolygon
    compute_seconds: float
    history: list[tuple[int, float, float]]
    violated: bool

    def write_history_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,best_cost,best_violation\n")
            for it, cost, viol in self.history:
                fh.write(f"{it},{cost!r},{viol!r}\n")


# ---------------------------------------------------------------------------
# B-spline evaluation

@lru_cache(maxsize=64)
def _basis_matrix(n_ctrl: int, samples: int) -> np.ndarray:
    """Clamped uniform B-spline basis sampled at `samples` parameter values.

    Degree is cubic when enough control points exist, degrading gracefully
    to quadratic or linear for tiny polygons. Rows sum to one and every
    entry is non-negative, which pins each sample inside the convex hull of
    the control points.
    """
    degree = min(3, n_ctrl - 1)
    interior = n_ctrl - degree - 1
    knots = np.concatenate([
        np.zeros(degree + 1),
        (np.arange(1, interior + 1) / (interior + 1)),
        np.ones(degree + 1),
    ])
    u = np.linspace(0.0, 1.0, samples)
    span = np.searchsorted(knots, u, side="right") - 1
    span = np.clip(span, degree, n_ctrl - 1)

    m = samples
    basis = np.zeros((m, degree + 1))
    basis[:, 0] = 1.0
    left = np.zeros((m, degree + 1))
    right = np.zeros((m, degree + 1))
    for j in range(1, degree + 1):
        left[:, j] = u - knots[span + 1 - j]
        right[:, j] = knots[span + j] - u
        saved = np.zeros(m)
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            temp = np.where(denom > 0.0, basis[:, r] / np.where(denom > 0.0, denom, 1.0), 0.0)
            basis[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        basis[:, j] = saved

    out = np.zeros((m, n_ctrl))
    rows = np.arange(m)
    for r in range(degree + 1):
        out[rows, span - degree + r] += basis[:, r]
    out.setflags(write=False)
    return out


def _wrap_angle(a):
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def spline_path(polygon: ControlPolygon, config: PathConfig,
                field: CurrentField) -> PathCandidate:
    """Sample the spline and derive timestamps and vehicle states.

    Timestamps integrate arc elements over ground speed. In current-aware
    mode the ground speed is cruise plus the current component along the
    local track, floored at 0.1 m/s; otherwise it is the cruise speed alone.
    """
    n_ctrl = polygon.points.shape[0]
    m = config.sample_count
    basis = _basis_matrix(n_ctrl, m)
    pos = basis @ polygon.points

    diffs = pos[1:] - pos[:-1]
    seg_len = np.linalg.norm(diffs, axis=1)
    arc = float(seg_len.sum())
    safe_len = np.where(seg_len > 0.0, seg_len, 1.0)
    track = diffs / safe_len[:, None]

    if config.current_aware_time:
        mids = (pos[1:] + pos[:-1]) / 2.0
        cu, cv = field.velocity_at(mids[:, 0], mids[:, 1])
        along = cu * track[:, 0] + cv * track[:, 1]
        speed = np.maximum(config.cruise_speed + along, MIN_GROUND_SPEED)
    else:
        speed = np.full(m - 1, config.cruise_speed)
    dt = np.where(seg_len > 0.0, seg_len / speed, 0.0)
    times = np.concatenate([[0.0], np.cumsum(dt)])

    horiz = np.hypot(diffs[:, 0], diffs[:, 1])
    yaw_seg = np.arctan2(diffs[:, 1], diffs[:, 0])
    pitch_seg = np.arctan2(-diffs[:, 2], horiz)
    yaw = np.concatenate([yaw_seg, yaw_seg[-1:]])
    pitch = np.concatenate([pitch_seg, pitch_seg[-1:]])

    cu, cv = field.velocity_at(pos[:, 0], pos[:, 1])
    cruise = config.cruise_speed
    u_vel = cruise * np.cos(yaw) * np.cos(pitch) + cu
    v_vel = cruise * np.sin(yaw) * np.cos(pitch) + cv
    w_vel = cruise * np.sin(pitch)

    states = np.column_stack([pos, yaw, pitch, u_vel, v_vel, w_vel])
    return PathCandidate(
        times=times,
        states=states,
        arc_length=arc,
        flight_time=float(times[-1]),
        polygon=polygon,
    )


def _yaw_rates(path: PathCandidate) -> np.ndarray:
    yaw = path.states[:, 3]
    dyaw = _wrap_angle(yaw[1:] - yaw[:-1])
    dt = path.times[1:] - path.times[:-1]
    rates = np.where(dt > 0.0, dyaw / np.where(dt > 0.0, dt, 1.0), 0.0)
    return np.concatenate([[0.0], rates])


def path_violations(
    path: PathCandidate,
    grid: TerrainGrid,
    obstacles,
    limits: VehicleLimits,
    mission_clock: float = 0.0,
) -> ViolationBreakdown:
    """Raw violation totals for one sampled path.

    Hinge terms sum each sample's excursion past its limit. The collision
    entry is a single 0/1 flag raised when any sample leaves water or
    enters an obstacle envelope evaluated at that sample's absolute time
    (mission clock plus path-relative timestamp).
    """
    xs, ys, zs = path.states[:, 0], path.states[:, 1], path.states[:, 2]
    codes, inside = grid.classes_at(xs, ys)
    collision = bool(np.any(~inside) or np.any(codes[inside] != CellClass.WATER))

    if not collision and obstacles:
        t_abs = mission_clock + path.times
        p = path.states[:, :3]
        for obs in obstacles:
            center0, _ = obstacle_region_at(obs, 0.0)
            vel = np.asarray(obs.velocity)
            centers = center0[None, :] + vel[None, :] * t_abs[:, None]
            radius = obs.radius + (obstacle_region_at(obs, 1.0)[1] - obs.radius) * t_abs
            d2 = ((p - centers) ** 2).sum(axis=1)
            if np.any(d2 <= radius**2):
                collision = True
                break

    u_vel, v_vel = path.states[:, 5], path.states[:, 6]
    rates = _yaw_rates(path)
    return ViolationBreakdown(
        depth_shallow=float(np.maximum(0.0, limits.depth_min - zs).sum()),
        depth_deep=float(np.maximum(0.0, zs - limits.depth_max).sum()),
        surge=float(np.maximum(0.0, u_vel - limits.surge_max).sum()),
        sway=float(np.maximum(0.0, np.abs(v_vel) - limits.sway_max).sum()),
        yaw_rate=float(np.maximum(0.0, np.abs(rates) - limits.yaw_rate_max).sum()),
        collision=int(collision),
    )


def path_cost(path: PathCandidate, violations: ViolationBreakdown,
              config: PathConfig) -> float:
    """Normalized flight time plus scaled, weighted violations.

    cost = T / T_ref + Q * sum(weight_i * violation_i) with T_ref the
    straight still-water time between the leg endpoints, so an unobstructed
    direct path costs about 1. Strictly increasing in every violation term.
    """
    start = path.states[0, :3]
    goal = path.states[-1, :3]
    straight = float(np.linalg.norm(goal - start))
    t_ref = max(straight / config.cruise_speed, 1e-9)
    return path.flight_time / t_ref + config.penalty_scale * violations.weighted_total(
        config.weights
    )


# ---------------------------------------------------------------------------
# differential evolution primitives

def de_mutate(population: np.ndarray, index: int, scale: float, rng,
              donor_mix: bool = False) -> np.ndarray:
    """Mutant vector from three distinct companions of `index`.

    Base form: x_r3 + F * (x_r1 - x_r2). With donor_mix the base vector is
    a random convex blend of all three companions instead of x_r3 alone.
    """
    pop = population.shape[0]
    if pop < 4:
        raise ValueError("differential evolution needs a population of at least 4")
    choices = [i for i in range(pop) if i != index]
    picks = rng.choice(len(choices), size=3, replace=False)
    r1, r2, r3 = (choices[int(p)] for p in picks)
    if donor_mix:
        lam = rng.random(3)
        lam /= lam.sum()
        base = (lam[0] * population[r1] + lam[1] * population[r2]
                + lam[2] * population[r3])
    else:
        base = population[r3]
    return base + scale * (population[r1] - population[r2])


def de_crossover(parent: np.ndarray, mutant: np.ndarray, rate: float, rng) -> np.ndarray:
    """Binomial crossover with one forced mutant gene.

    Gene j comes from the mutant when rand_j <= rate or j is the forced
    index drawn per call, guaranteeing the trial differs from the parent in
    at least one position.
    """
    dim = parent.shape[0]
    forced = int(rng.integers(dim))
    take = rng.random(dim) <= rate
    take[forced] = True
    return np.where(take, mutant, parent)


def de_select(parent: np.ndarray, trial: np.ndarray,
              parent_cost: float, trial_cost: float):
    """Keep the cheaper vector; the parent survives ties."""
    if trial_cost < parent_cost:
        return trial, trial_cost
    return parent, parent_cost


# ---------------------------------------------------------------------------
# firefly primitive

def fa_move(xi: np.ndarray, xj: np.ndarray, params: FaParams, iteration: int,
            rng, scale, distance: float | None = None) -> np.ndarray:
    """Move firefly i toward a brighter firefly j.

    x' = x_i + beta0 * exp(-gamma * L^2) * (x_j - x_i) + alpha_t * zeta,
    where alpha_t = noise * damping^iteration and zeta is uniform in
    +-0.5 per dimension scaled by `scale` (the corridor width vector).
    L defaults to the Euclidean distance between the fireflies; callers
    may pass a normalized distance instead.
    """
    if distance is None:
        distance = float(np.linalg.norm(xj - xi))
    beta = params.attractiveness * math.exp(-params.absorption * distance * distance)
    alpha_t = params.noise * params.damping**iteration
    zeta = (rng.random(xi.shape[0]) - 0.5) * np.asarray(scale, dtype=float)
    return xi + beta * (xj - xi) + alpha_t * zeta


# ---------------------------------------------------------------------------
# solver front door

def leg_corridor(start, goal, grid: TerrainGrid, limits: VehicleLimits,
                 margin: float):
    """Axis-aligned search box: the leg's bounding box inflated by margin
    times the leg length per axis, clipped to the plan area and the legal
    depth band."""
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    length = float(np.linalg.norm(goal - start))
    pad = margin * length
    lower = np.minimum(start, goal) - pad
    upper = np.maximum(start, goal) + pad
    lower[0] = max(lower[0], 0.0)
    lower[1] = max(lower[1], 0.0)
    lower[2] = max(lower[2], limits.depth_min, 0.0)
    upper[0] = min(upper[0], grid.width_m)
    upper[1] = min(upper[1], grid.height_m)
    upper[2] = min(upper[2], limits.depth_max, grid.depth_m)
    for d in range(3):
        if lower[d] > upper[d]:
            mid = (lower[d] + upper[d]) / 2.0
            lower[d] = upper[d] = mid
    return lower, upper


def plan_path(
    start,
    goal,
    grid: TerrainGrid,
    field: CurrentField,
    obstacles,
    config: PathConfig,
    warm_start: ControlPolygon | None = None,
    mission_clock: float = 0.0,
) -> PathResult:
    """Optimize a spline path from start to goal through the environment.

    The initial population mixes the straight-line polygon, optional warm
    starts jittered from a previous polygon, and uniform corridor samples.
    The best-by-cost candidate is tracked across iterations (logged with
    its weighted violation total) and returned even when it still violates;
    the `violated` flag tells the caller what it got.
    """
    started = time.perf_counter()
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    if float(np.linalg.norm(goal - start)) <= 0.0:
        raise ValueError("leg endpoints must be distinct")
    rng = np.random.default_rng(config.seed)
    lower, upper = leg_corridor(start, goal, grid, config.limits, config.corridor_margin)
    width = upper - lower
    n_int = config.interior_points
    dim = 3 * n_int
    lo_flat = np.tile(lower, n_int)
    hi_flat = np.tile(upper, n_int)
    span_flat = hi_flat - lo_flat

    def make_polygon(vec):
        pts = np.vstack([start, vec.reshape(n_int, 3), goal])
        return ControlPolygon(pts, lower, upper)

    best = {"cost": math.inf, "vec": None, "path": None, "viol": None}

    def evaluate(vec):
        vec = np.clip(vec, lo_flat, hi_flat)
        path = spline_path(make_polygon(vec), config, field)
        viol = path_violations(path, grid, obstacles, config.limits, mission_clock)
        cost = path_cost(path, viol, config)
        if cost < best["cost"]:
            best.update(cost=cost, vec=vec.copy(), path=path, viol=viol)
        return cost

    # Straight-line seed plus warm starts plus uniform corridor samples.
    ts = np.linspace(0.0, 1.0, n_int + 2)[1:-1]
    straight = (start[None, :] + ts[:, None] * (goal - start)[None, :]).ravel()
    straight = np.clip(straight, lo_flat, hi_flat)
    seeds = [straight]
    if warm_start is not None and warm_start.interior.shape[0] == n_int:
        warm = np.clip(warm_start.interior.ravel(), lo_flat, hi_flat)
        seeds.append(warm)
        jitter_count = max(0, int(round(config.warm_fraction * config.population)) - 1)
        for _ in range(jitter_count):
            seeds.append(np.clip(warm + rng.normal(0.0, 0.02, size=dim) * span_flat,
                                 lo_flat, hi_flat))
    while len(seeds) < config.population:
        seeds.append(lo_flat + rng.random(dim) * span_flat)
    vectors = np.array(seeds[: config.population])
    costs = np.array([evaluate(v) for v in vectors])

    history: list[tuple[int, float, float]] = []

    def log(iteration):
        viol_total = best["viol"].weighted_total(config.weights)
        history.append((iteration, best["cost"], viol_total))

    if config.algorithm == PathAlgorithm.DE:
        params = config.de
        for it in range(config.iterations):
            for i in range(config.population):
                mutant = de_mutate(vectors, i, params.scale, rng,
                                   donor_mix=params.donor_mix)
                trial = de_crossover(vectors[i], mutant, params.crossover_rate, rng)
                trial = np.clip(trial, lo_flat, hi_flat)
                trial_cost = evaluate(trial)
                survivor, cost = de_select(vectors[i], trial, float(costs[i]), trial_cost)
                vectors[i] = survivor
                costs[i] = cost
            log(it)

    elif config.algorithm == PathAlgorithm.FA:
        params = config.fa
        for it in range(config.iterations):
            order = np.argsort(costs, kind="stable")
            vectors = vectors[order]
            costs = costs[order]
            for i in range(config.population):
                moved = False
                for j in range(config.population):
                    if costs[j] < costs[i]:
                        norm_dist = float(np.linalg.norm(
                            (vectors[j] - vectors[i]) / np.where(span_flat > 0,
                                                                 span_flat, 1.0)))
                        vectors[i] = np.clip(
                            fa_move(vectors[i], vectors[j], params, it, rng,
                                    span_flat, distance=norm_dist),
                            lo_flat, hi_flat)
                        moved = True
                if moved:
                    costs[i] = evaluate(vectors[i])
            log(it)

    elif config.algorithm == PathAlgorithm.BBO:
        from .routing import _bbo_generation

        params = config.bbo
        order = np.argsort(costs, kind="stable")
        vectors = vectors[order]
        costs = costs[order]

        def resample(r, d):
            return lo_flat[d] + r.random() * span_flat[d]

        for it in range(config.iterations):
            vectors = _bbo_generation(vectors, params, rng, resample)
            vectors = np.clip(vectors, lo_flat, hi_flat)
            costs = np.array([evaluate(v) for v in vectors])
            order = np.argsort(costs, kind="stable")
            vectors = vectors[order]
            costs = costs[order]
            log(it)

    elif config.algorithm == PathAlgorithm.PSO:
        params = config.pso
        v_clamp = np.maximum(params.velocity_fraction * span_flat, 1e-9)
        swarm_params = _PsoClampParams(params.inertia, params.cognitive,
                                       params.social, v_clamp)
        particles = [Particle(vectors[i].copy(),
                              rng.uniform(-v_clamp, v_clamp))
                     for i in range(config.population)]
        p_best = [vectors[i].copy() for i in range(config.population)]
        p_cost = costs.copy()
        g_idx = int(np.argmin(p_cost))
        g_best, g_cost = p_best[g_idx].copy(), float(p_cost[g_idx])
        for it in range(config.iterations):
            for i, particle in enumerate(particles):
                particles[i] = pso_update(swarm_params, particle, p_best[i], g_best, rng)
                particles[i].position = np.clip(particles[i].position, lo_flat, hi_flat)
                c = evaluate(particles[i].position)
                if c < p_cost[i]:
                    p_cost[i] = c
                    p_best[i] = particles[i].position.copy()
                    if c < g_cost:
                        g_cost = c
                        g_best = particles[i].position.copy()
            log(it)

    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unsupported algorithm {config.algorithm}")

    elapsed = time.perf_counter() - started
    path = best["path"]
    viol = best["viol"]
    path.cost = best["cost"]
    path.violations = viol
    return PathResult(
        path=path,
        polygon=path.polygon,
        compute_seconds=elapsed,
        history=history,
        violated=not viol.clean(),
    )


@dataclass
class _PsoClampParams:
    """Adapter giving pso_update a per-dimension velocity clamp."""

    inertia: float
    cognitive: float
    social: float
    velocity_bound: np.ndarray
