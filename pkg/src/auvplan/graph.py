"""Mission graph: weighted waypoints, task edges and route feasibility.

A mission is a connected undirected graph of waypoints inside the terrain.
Some edges carry a task whose value raises the edge weight above the
baseline of 1; traversal time is edge length over cruise speed. Routes are
simple vertex paths from the start waypoint to the destination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from .environment import TerrainGrid, is_legal

# REMUS-class cruise speed, roughly five knots.
DEFAULT_CRUISE_SPEED_MPS = 2.57

BASE_EDGE_WEIGHT = 1.0


class PlacementError(RuntimeError):
    """Could not place the requested number of waypoints in legal water."""


@dataclass(frozen=True)
class Task:
    id: int
    weight: float

    def __post_init__(self):
        if self.weight <= 0.0:
            raise ValueError("task weight must be positive")


@dataclass(frozen=True)
class Waypoint:
    id: int
    x: float
    y: float
    z: float

    @property
    def position(self):
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class Edge:
    """Undirected edge, stored with u < v."""

    u: int
    v: int
    task_id: int | None
    weight: float
    distance: float
    time: float


class Feasibility(IntEnum):
    """Route verdict. Non-zero values name the first violated criterion."""

    FEASIBLE = 0
    BAD_ENDPOINTS = 1
    MISSING_EDGE = 2
    REPEATED_VERTEX = 3
    REPEATED_EDGE = 4


@dataclass(frozen=True)
class MissionGraph:
    waypoints: tuple[Waypoint, ...]
    edges: dict[tuple[int, int], Edge]
    start: int
    dest: int
    speed: float

    def __post_init__(self):
        adjacency: dict[int, list[int]] = {wp.id: [] for wp in self.waypoints}
        for (u, v) in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        object.__setattr__(
            self, "_adjacency", {k: tuple(sorted(vs)) for k, vs in adjacency.items()}
        )

    def neighbors(self, vid: int) -> tuple[int, ...]:
        return self._adjacency[vid]

    def edge_between(self, a: int, b: int) -> Edge | None:
        return self.edges.get((a, b) if a < b else (b, a))

    def with_start(self, start: int) -> "MissionGraph":
        return replace(self, start=start)

    @property
    def node_count(self) -> int:
        return len(self.waypoints)

    def task_edge_count(self) -> int:
        return sum(1 for e in self.edges.values() if e.task_id is not None)


def sample_tasks(seed: int, count: int = 30, mean: float = 20.0, std: float = 10.0):
    """Draw task weights from a normal, redrawing any non-positive value."""
    rng = np.random.default_rng(seed)
    tasks = []
    for tid in range(count):
        w = rng.normal(mean, std)
        while w <= 0.0:
            w = rng.normal(mean, std)
        tasks.append(Task(tid, float(w)))
    return tasks


def build_graph(
    grid: TerrainGrid,
    node_count: int,
    tasks,
    edge_density: float,
    seed: int,
    *,
    speed: float = DEFAULT_CRUISE_SPEED_MPS,
    jitter_sigma: float = 0.0,
    start_id: int | None = None,
    dest_id: int | None = None,
) -> MissionGraph:
    """Sample a connected waypoint graph over legal water.

    Waypoints are rejection-sampled uniformly over the plan volume until they
    land in water. A random spanning tree guarantees connectivity; extra
    edges are added until the requested density of the complete graph is
    reached. Tasks are then attached to distinct random edges, each raising
    that edge's weight to 1 + task weight. With jitter_sigma > 0 every
    accepted waypoint is nudged by a Gaussian offset in the plane; a nudge
    that would leave legal water is dropped for that waypoint.
    """
    if node_count < 2:
        raise ValueError("need at least two waypoints")
    if not (0.0 < edge_density <= 1.0):
        raise ValueError("edge_density must be in (0, 1]")
    if speed <= 0.0:
        raise ValueError("speed must be positive")

    rng = np.random.default_rng(seed)
    positions = []
    attempts_left = 1000 * node_count
    while len(positions) < node_count:
        if attempts_left <= 0:
            raise PlacementError(
                f"placed only {len(positions)} of {node_count} waypoints"
            )
        attempts_left -= 1
        x = rng.uniform(0.0, grid.width_m)
        y = rng.uniform(0.0, grid.height_m)
        z = rng.uniform(0.0, grid.depth_m)
        if is_legal(grid, (x, y, z)):
            positions.append((x, y, z))

    if jitter_sigma > 0.0:
        jittered = []
        for (x, y, z) in positions:
            nx = x + rng.normal(0.0, jitter_sigma)
            ny = y + rng.normal(0.0, jitter_sigma)
            if is_legal(grid, (nx, ny, z)):
                jittered.append((nx, ny, z))
            else:
                jittered.append((x, y, z))
        positions = jittered

    waypoints = tuple(Waypoint(i, *pos) for i, pos in enumerate(positions))

    # Random spanning tree, then top up with random extra pairs.
    pairs = set()
    for i in range(1, node_count):
        j = int(rng.integers(0, i))
        pairs.add((j, i))
    max_edges = node_count * (node_count - 1) // 2
    target = max(node_count - 1, int(round(edge_density * max_edges)))
    target = min(target, max_edges)
    if target > len(pairs):
        remaining = [
            (a, b)
            for a in range(node_count)
            for b in range(a + 1, node_count)
            if (a, b) not in pairs
        ]
        picks = rng.permutation(len(remaining))[: target - len(pairs)]
        for idx in sorted(picks):
            pairs.add(remaining[idx])

    tasks = list(tasks)
    ordered_pairs = sorted(pairs)
    if len(tasks) > len(ordered_pairs):
        raise ValueError(
            f"{len(tasks)} tasks cannot fit on {len(ordered_pairs)} edges"
        )
    task_slots = rng.choice(len(ordered_pairs), size=len(tasks), replace=False)
    task_on_pair = {ordered_pairs[slot]: task for slot, task in zip(task_slots, tasks)}

    edges = {}
    for (u, v) in ordered_pairs:
        pu, pv = waypoints[u].position, waypoints[v].position
        dist = float(np.linalg.norm(pv - pu))
        task = task_on_pair.get((u, v))
        weight = BASE_EDGE_WEIGHT + task.weight if task else BASE_EDGE_WEIGHT
        edges[(u, v)] = Edge(u, v, task.id if task else None, weight, dist, dist / speed)

    start = 0 if start_id is None else start_id
    if dest_id is None:
        # Farthest waypoint from the start makes the longest natural mission.
        dists = [float(np.linalg.norm(wp.position - waypoints[start].position))
                 for wp in waypoints]
        dists[start] = -1.0
        dest = int(np.argmax(dists))
    else:
        dest = dest_id
    if start == dest:
        raise ValueError("start and destination must differ")

    return MissionGraph(waypoints, edges, start, dest, speed)


def check_feasibility(graph: MissionGraph, route) -> Feasibility:
    """Verdict for a vertex sequence, reporting the first violated criterion.

    Criteria, in order: endpoints are start and destination; every hop is an
    existing edge; no vertex repeats; no edge repeats.
    """
    route = tuple(route)
    if len(route) == 0 or route[0] != graph.start or route[-1] != graph.dest:
        return Feasibility.BAD_ENDPOINTS
    hops = list(zip(route[:-1], route[1:]))
    for a, b in hops:
        if graph.edge_between(a, b) is None:
            return Feasibility.MISSING_EDGE
    if len(set(route)) != len(route):
        return Feasibility.REPEATED_VERTEX
    keys = [(a, b) if a < b else (b, a) for a, b in hops]
    if len(set(keys)) != len(keys):
        return Feasibility.REPEATED_EDGE
    return Feasibility.FEASIBLE


def decode_priority_vector(graph: MissionGraph, priorities):
    """Turn a per-vertex priority vector into a feasible route, or None.

    The walk starts at the start waypoint and repeatedly advances to the
    unvisited neighbor with the highest priority, breaking ties toward the
    lower vertex id. A vertex with no unvisited neighbor is a dead end: the
    walk retreats one step and that excursion is pruned from the route, so
    the emitted route is always a simple path. Reaching the destination
    stops the walk. If every alternative is exhausted without reaching the
    destination the decode fails and None is returned.
    """
    prio = np.asarray(priorities, dtype=float)
    if prio.shape[0] != graph.node_count:
        raise ValueError("priority vector length must equal node count")
    start, dest = graph.start, graph.dest
    visited = [False] * graph.node_count
    visited[start] = True
    stack = [start]
    while stack:
        cur = stack[-1]
        if cur == dest:
            return tuple(stack)
        best = -1
        best_p = -math.inf
        for n in graph.neighbors(cur):
            if not visited[n]:
                p = prio[n]
                if p > best_p or (p == best_p and n < best):
                    best, best_p = n, p
        if best >= 0:
            visited[best] = True
            stack.append(best)
        else:
            stack.pop()
    return None


# ---------------------------------------------------------------------------
# plain-text serialization

GRAPH_FORMAT_TAG = "missiongraph 1"


def graph_to_text(graph: MissionGraph) -> str:
    """Line-oriented dump that round-trips exactly (floats via repr)."""
    lines = [GRAPH_FORMAT_TAG]
    lines.append(f"speed {graph.speed!r}")
    lines.append(f"start {graph.start}")
    lines.append(f"dest {graph.dest}")
    lines.append(f"waypoints {len(graph.waypoints)}")
    for wp in graph.waypoints:
        lines.append(f"{wp.id} {wp.x!r} {wp.y!r} {wp.z!r}")
    lines.append(f"edges {len(graph.edges)}")
    for (u, v) in sorted(graph.edges):
        e = graph.edges[(u, v)]
        tid = "-" if e.task_id is None else str(e.task_id)
        lines.append(f"{u} {v} {tid} {e.weight!r} {e.distance!r} {e.time!r}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> MissionGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines[0] != GRAPH_FORMAT_TAG:
        raise ValueError(f"unsupported graph format: {lines[0]!r}")
    speed = float(lines[1].split()[1])
    start = int(lines[2].split()[1])
    dest = int(lines[3].split()[1])
    n = int(lines[4].split()[1])
    waypoints = []
    for ln in lines[5 : 5 + n]:
        vid, x, y, z = ln.split()
        waypoints.append(Waypoint(int(vid), float(x), float(y), float(z)))
    m_line = 5 + n
    m = int(lines[m_line].split()[1])
    edges = {}
    for ln in lines[m_line + 1 : m_line + 1 + m]:
        u, v, tid, w, d, t = ln.split()
        edges[(int(u), int(v))] = Edge(
            int(u), int(v), None if tid == "-" else int(tid),
            float(w), float(d), float(t),
        )
    return MissionGraph(tuple(waypoints), edges, start, dest, speed)
