import math

import numpy as np
import pytest

from auvplan.environment import TerrainGrid, generate_synthetic_terrain, TerrainParams, is_legal
from auvplan.graph import (
    BASE_EDGE_WEIGHT,
    Edge,
    Feasibility,
    MissionGraph,
    Task,
    Waypoint,
    build_graph,
    check_feasibility,
    decode_priority_vector,
    graph_from_text,
    graph_to_text,
    sample_tasks,
)


def make_graph(positions, pairs, start, dest, speed=1.0, task_weights=None):
    """Hand-build a graph; task_weights maps an edge pair to a task weight."""
    task_weights = task_weights or {}
    waypoints = tuple(Waypoint(i, *p) for i, p in enumerate(positions))
    edges = {}
    tid = 0
    for (a, b) in pairs:
        u, v = (a, b) if a < b else (b, a)
        d = float(np.linalg.norm(waypoints[v].position - waypoints[u].position))
        if (a, b) in task_weights or (b, a) in task_weights:
            w = BASE_EDGE_WEIGHT + task_weights.get((a, b), task_weights.get((b, a)))
            edges[(u, v)] = Edge(u, v, tid, w, d, d / speed)
            tid += 1
        else:
            edges[(u, v)] = Edge(u, v, None, BASE_EDGE_WEIGHT, d, d / speed)
    return MissionGraph(waypoints, edges, start, dest, speed)


def open_grid():
    return TerrainGrid.open_water(1000.0, 1000.0, 100.0, 50.0)


class TestSampleTasks:
    def test_all_positive_and_deterministic(self):
        a = sample_tasks(3, count=30)
        b = sample_tasks(3, count=30)
        assert all(t.weight > 0 for t in a)
        assert [t.weight for t in a] == [t.weight for t in b]
        assert [t.id for t in a] == list(range(30))

    def test_zero_std_gives_constant_weights(self):
        tasks = sample_tasks(0, count=10, mean=20.0, std=0.0)
        assert all(t.weight == 20.0 for t in tasks)

    def test_resampling_shifts_mean_upward(self):
        # With mean 0 every weight still comes out positive.
        tasks = sample_tasks(1, count=200, mean=0.0, std=5.0)
        assert all(t.weight > 0 for t in tasks)

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            Task(0, 0.0)


class TestBuildGraph:
    def test_minimal_two_node_graph(self):
        g = build_graph(open_grid(), 2, [], 0.01, seed=0)
        assert g.node_count == 2
        assert len(g.edges) == 1
        assert {g.start, g.dest} == {0, 1}

    def test_connected_and_dense_enough(self):
        g = build_graph(open_grid(), 40, sample_tasks(0, 30), 0.15, seed=1)
        assert g.node_count == 40
        target = round(0.15 * 40 * 39 / 2)
        assert len(g.edges) >= max(39, target)
        # BFS connectivity over all waypoints.
        seen = {g.start}
        frontier = [g.start]
        while frontier:
            nxt = []
            for u in frontier:
                for v in g.neighbors(u):
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        assert len(seen) == 40

    def test_task_edges_match_task_count(self):
        tasks = sample_tasks(2, 30)
        g = build_graph(open_grid(), 40, tasks, 0.2, seed=3)
        assert g.task_edge_count() == 30
        heavy = [e for e in g.edges.values() if e.weight > BASE_EDGE_WEIGHT]
        assert len(heavy) == 30
        by_id = {t.id: t.weight for t in tasks}
        for e in heavy:
            assert e.weight == pytest.approx(BASE_EDGE_WEIGHT + by_id[e.task_id])
        for e in g.edges.values():
            if e.task_id is None:
                assert e.weight == BASE_EDGE_WEIGHT

    def test_edge_metrics_are_euclidean_and_exact(self):
        g = build_graph(open_grid(), 10, [], 0.4, seed=5, speed=2.5)
        for (u, v), e in g.edges.items():
            pu = g.waypoints[u].position
            pv = g.waypoints[v].position
            d = math.sqrt(((pu - pv) ** 2).sum())
            assert e.distance == pytest.approx(d, rel=1e-12)
            assert e.time == e.distance / 2.5

    def test_waypoints_land_in_legal_water(self):
        grid = generate_synthetic_terrain(1, TerrainParams(
            width_m=4000, height_m=4000, island_count=6))
        g = build_graph(grid, 25, [], 0.2, seed=7)
        for wp in g.waypoints:
            assert is_legal(grid, (wp.x, wp.y, wp.z))

    def test_deterministic_per_seed(self):
        a = build_graph(open_grid(), 20, sample_tasks(0, 10), 0.2, seed=42)
        b = build_graph(open_grid(), 20, sample_tasks(0, 10), 0.2, seed=42)
        assert a == b
        c = build_graph(open_grid(), 20, sample_tasks(0, 10), 0.2, seed=43)
        assert a != c

    def test_jitter_keeps_waypoints_legal(self):
        grid = generate_synthetic_terrain(3, TerrainParams(
            width_m=4000, height_m=4000, island_count=6))
        g = build_graph(grid, 30, [], 0.2, seed=9, jitter_sigma=200.0)
        for wp in g.waypoints:
            assert is_legal(grid, (wp.x, wp.y, wp.z))

    def test_more_tasks_than_edges_rejected(self):
        with pytest.raises(ValueError):
            build_graph(open_grid(), 3, sample_tasks(0, 10), 0.01, seed=0)


class TestCheckFeasibility:
    def graph(self):
        # Square with a diagonal: 0-1-2-3 ring plus 0-2.
        return make_graph(
            [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)],
            [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)],
            start=0, dest=2,
        )

    def test_feasible_route(self):
        g = self.graph()
        assert check_feasibility(g, (0, 1, 2)) == Feasibility.FEASIBLE
        assert check_feasibility(g, (0, 2)) == Feasibility.FEASIBLE
        assert check_feasibility(g, (0, 3, 2)) == Feasibility.FEASIBLE

    def test_bad_endpoints_reported_first(self):
        g = self.graph()
        assert check_feasibility(g, (1, 2)) == Feasibility.BAD_ENDPOINTS
        assert check_feasibility(g, (0, 1)) == Feasibility.BAD_ENDPOINTS
        assert check_feasibility(g, ()) == Feasibility.BAD_ENDPOINTS

    def test_missing_edge(self):
        g = self.graph()
        assert check_feasibility(g, (0, 1, 3, 2)) == Feasibility.MISSING_EDGE

    def test_repeated_vertex(self):
        g = self.graph()
        assert check_feasibility(g, (0, 1, 2, 0, 3, 2)) == Feasibility.REPEATED_VERTEX

    def test_repeated_edge_needs_vertex_repeat_first(self):
        # A walk that repeats an edge necessarily repeats a vertex, so the
        # vertex criterion fires first in the fixed order.
        g = self.graph()
        assert check_feasibility(g, (0, 1, 0, 1, 2)) == Feasibility.REPEATED_VERTEX


class TestDecodePriorityVector:
    def test_triangle_prefers_high_priority_detour(self):
        g = make_graph([(0, 0, 0), (1, 0, 0), (2, 0, 0)],
                       [(0, 1), (1, 2), (0, 2)], start=0, dest=2)
        assert decode_priority_vector(g, [0.0, 10.0, 1.0]) == (0, 1, 2)
        assert decode_priority_vector(g, [0.0, 1.0, 10.0]) == (0, 2)

    def test_dead_end_leaves_are_pruned(self):
        # Star: hub 0 with leaves 1..3 and destination 4. Whatever the
        # priorities, the walk must back out of dead-end leaves and still
        # deliver the direct route.
        g = make_graph([(0, 0, 0), (1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)],
                       [(0, 1), (0, 2), (0, 3), (0, 4)], start=0, dest=4)
        rng = np.random.default_rng(0)
        for _ in range(50):
            route = decode_priority_vector(g, rng.uniform(0, 1, size=5))
            assert route == (0, 4)

    def test_tie_breaks_to_lower_vertex_id(self):
        g = make_graph([(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 0, 0)],
                       [(0, 1), (0, 2), (1, 3), (2, 3)], start=0, dest=3)
        # Vertices 1 and 2 tie; the walk must go through 1.
        assert decode_priority_vector(g, [0.0, 5.0, 5.0, 0.0]) == (0, 1, 3)

    def test_unreachable_destination_returns_none(self):
        # Two components; decode must fail, not loop.
        wps = tuple(Waypoint(i, float(i), 0.0, 0.0) for i in range(4))
        edges = {}
        for (u, v) in [(0, 1), (2, 3)]:
            d = float(abs(u - v))
            edges[(u, v)] = Edge(u, v, None, BASE_EDGE_WEIGHT, d, d)
        g = MissionGraph(wps, edges, 0, 3, 1.0)
        assert decode_priority_vector(g, [1.0, 1.0, 1.0, 1.0]) is None

    def test_wrong_length_rejected(self):
        g = make_graph([(0, 0, 0), (1, 0, 0)], [(0, 1)], start=0, dest=1)
        with pytest.raises(ValueError):
            decode_priority_vector(g, [1.0])

    def test_fuzz_output_always_feasible(self):
        # Over many random graphs and priority vectors the decode either
        # fails explicitly or returns a route that passes every criterion.
        rng = np.random.default_rng(1234)
        grid = open_grid()
        failures = 0
        for trial in range(10_000):
            n = int(rng.integers(2, 10))
            density = float(rng.uniform(0.15, 0.9))
            try:
                g = build_graph(grid, n, [], density, seed=int(rng.integers(1 << 30)))
            except ValueError:
                continue
            prio = rng.uniform(0.0, 100.0, size=n)
            route = decode_priority_vector(g, prio)
            if route is None:
                failures += 1
            else:
                assert check_feasibility(g, route) == Feasibility.FEASIBLE
        # Generated graphs are connected, so the decode must always succeed.
        assert failures == 0

    def test_every_simple_path_is_reachable_by_some_priority(self):
        # Construct the priority vector that forces a chosen path and check
        # the decode reproduces it exactly.
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(3, 9))
            g = build_graph(open_grid(), n, [], float(rng.uniform(0.3, 1.0)),
                            seed=int(rng.integers(1 << 30)))
            paths = enumerate_simple_paths(g)
            path = paths[int(rng.integers(len(paths)))]
            prio = np.zeros(n)
            interior = [v for v in path if v not in (g.start, g.dest)]
            for rank, v in enumerate(interior):
                prio[v] = 1000.0 - rank
            prio[g.dest] = 500.0 - len(interior)
            assert decode_priority_vector(g, prio) == path


def enumerate_simple_paths(graph):
    """Exhaustive DFS enumeration of simple start-to-dest paths."""
    out = []
    def extend(node, seen, path):
        if node == graph.dest:
            out.append(tuple(path))
            return
        for n in graph.neighbors(node):
            if n not in seen:
                seen.add(n)
                path.append(n)
                extend(n, seen, path)
                path.pop()
                seen.remove(n)
    extend(graph.start, {graph.start}, [graph.start])
    return out


class TestSerialization:
    def test_round_trip_is_exact(self):
        g = build_graph(open_grid(), 15, sample_tasks(5, 8), 0.3, seed=77, speed=2.57)
        text = graph_to_text(g)
        back = graph_from_text(text)
        assert back == g
        assert graph_to_text(back) == text

    def test_rejects_unknown_format(self):
        with pytest.raises(ValueError):
            graph_from_text("somethingelse 9\n")
