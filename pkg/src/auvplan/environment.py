"""Operating environment for underwater missions.

Three ingredients live here: a legality-classified terrain grid (water,
coast, uncertain), a planar current field built from superposed decaying
vortices, and drifting obstacles whose position uncertainty grows with
time. Everything is deterministic given a seed and cheap to query in
bulk, because path evaluation hits these functions thousands of times
per planning call.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np


class CellClass(IntEnum):
    """Terrain legality classes. Values double as raster byte codes."""

    COAST = 0
    WATER = 1
    UNCERTAIN = 2


# Reference colors used both to render grids and to label clusters.
WATER_REF_COLOR = (0.0, 0.0, 255.0)
LAND_REF_COLOR = (139.0, 69.0, 19.0)
UNCERTAIN_RENDER_COLOR = (128.0, 128.0, 128.0)

# Distances below this count as sitting on a vortex center.
VORTEX_CENTER_EPS_M = 1e-9

OBSTACLE_CONFIDENCE = 0.98
# Radius multiplier that puts 98% of a circular Gaussian position error
# inside the disc: sqrt(-2 ln(1 - 0.98)) ~= 2.7971.
Z98 = math.sqrt(-2.0 * math.log(1.0 - OBSTACLE_CONFIDENCE))

KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-6


class OutOfBoundsError(ValueError):
    """Query point lies outside the terrain plan area."""


class DegenerateClusteringError(ValueError):
    """Raster has fewer pixels than requested clusters."""


class InfeasibleTerrainError(ValueError):
    """Generated terrain left less than 10% water."""


@dataclass(frozen=True)
class TerrainGrid:
    """Rectangular plan area split into equal square cells.

    cells[row, col] holds a CellClass code; row r covers
    y in [r*cell_size_m, (r+1)*cell_size_m) and col likewise for x.
    The upper boundary (x == width_m or y == height_m) belongs to the
    last cell so the closed plan area is fully covered.
    """

    width_m: float
    height_m: float
    depth_m: float
    cell_size_m: float
    cells: np.ndarray

    def __post_init__(self):
        cells = np.ascontiguousarray(np.asarray(self.cells, dtype=np.uint8))
        if cells.ndim != 2 or cells.size == 0:
            raise ValueError("cells must be a non-empty 2-D array")
        if not np.all(cells <= CellClass.UNCERTAIN):
            raise ValueError("cell codes must be 0, 1 or 2")
        if self.cell_size_m <= 0 or self.depth_m <= 0:
            raise ValueError("cell_size_m and depth_m must be positive")
        ny, nx = cells.shape
        if abs(nx * self.cell_size_m - self.width_m) > 1e-6 * self.cell_size_m:
            raise ValueError("width_m inconsistent with column count")
        if abs(ny * self.cell_size_m - self.height_m) > 1e-6 * self.cell_size_m:
            raise ValueError("height_m inconsistent with row count")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_cells(cls, cells, cell_size_m, depth_m):
        cells = np.asarray(cells, dtype=np.uint8)
        ny, nx = cells.shape
        return cls(nx * cell_size_m, ny * cell_size_m, depth_m, cell_size_m, cells)

    @classmethod
    def open_water(cls, width_m, height_m, depth_m, cell_size_m):
        nx = max(1, int(round(width_m / cell_size_m)))
        ny = max(1, int(round(height_m / cell_size_m)))
        cells = np.full((ny, nx), CellClass.WATER, dtype=np.uint8)
        return cls.from_cells(cells, cell_size_m, depth_m)

    @property
    def shape(self):
        return self.cells.shape

    def cell_index(self, x, y):
        """Row and column of the cell containing (x, y), or raise OutOfBoundsError."""
        if not (0.0 <= x <= self.width_m and 0.0 <= y <= self.height_m):
            raise OutOfBoundsError(f"point ({x}, {y}) outside plan area")
        ny, nx = self.cells.shape
        col = min(int(x // self.cell_size_m), nx - 1)
        row = min(int(y // self.cell_size_m), ny - 1)
        return row, col

    def class_at(self, x, y):
        row, col = self.cell_index(x, y)
        return CellClass(self.cells[row, col])

    def classes_at(self, xs, ys):
        """Vectorized class lookup.

        Returns (codes, inside). Out-of-bounds entries are masked False in
        `inside`; their code entry is meaningless and must not be used.
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        inside = (xs >= 0.0) & (xs <= self.width_m) & (ys >= 0.0) & (ys <= self.height_m)
        ny, nx = self.cells.shape
        cols = np.clip((xs // self.cell_size_m).astype(np.int64), 0, nx - 1)
        rows = np.clip((ys // self.cell_size_m).astype(np.int64), 0, ny - 1)
        return self.cells[rows, cols], inside

    def water_fraction(self):
        return float(np.count_nonzero(self.cells == CellClass.WATER) / self.cells.size)


def is_legal(grid: TerrainGrid, point) -> bool:
    """True iff the 3-D point sits in a Water cell at a depth within [0, depth_m]."""
    x, y, z = float(point[0]), float(point[1]), float(point[2])
    if not (0.0 <= z <= grid.depth_m):
        return False
    try:
        cls = grid.class_at(x, y)
    except OutOfBoundsError:
        return False
    return cls == CellClass.WATER


# ---------------------------------------------------------------------------
# raster import / export

def render_raster(grid: TerrainGrid) -> np.ndarray:
    """Color image (H, W, 3) of the grid using the reference palette."""
    palette = np.array(
        [LAND_REF_COLOR, WATER_REF_COLOR, UNCERTAIN_RENDER_COLOR], dtype=np.uint8
    )
    return palette[grid.cells]


def save_raster(grid: TerrainGrid, path) -> None:
    """Write the grid as a binary PGM file, one byte per cell.

    Byte values are the CellClass codes (0 coast, 1 water, 2 uncertain).
    Physical geometry rides along in a comment line so the file round-trips.
    """
    ny, nx = grid.cells.shape
    header = (
        f"P5\n"
        f"# geometry width_m={grid.width_m!r} height_m={grid.height_m!r} "
        f"depth_m={grid.depth_m!r} cell_size_m={grid.cell_size_m!r}\n"
        f"{nx} {ny}\n2\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(grid.cells.tobytes())


def load_raster(path) -> TerrainGrid:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM terrain raster")
    lines = data.split(b"\n")
    geometry = {}
    fields = []
    consumed = 0
    for line in lines[1:]:
        consumed += 1
        if line.startswith(b"#"):
            for token in line[1:].split():
                if b"=" in token:
                    key, _, val = token.partition(b"=")
                    geometry[key.decode()] = float(val)
            continue
        fields.extend(line.split())
        if len(fields) >= 3:
            break
    nx, ny, maxval = int(fields[0]), int(fields[1]), int(fields[2])
    if maxval > 255:
        raise ValueError("unsupported PGM maxval")
    offset = len(b"\n".join(lines[: consumed + 1])) + 1
    cells = np.frombuffer(data[offset : offset + nx * ny], dtype=np.uint8).reshape(ny, nx)
    cell_size = geometry.get("cell_size_m", 1.0)
    depth = geometry.get("depth_m", 100.0)
    return TerrainGrid.from_cells(cells.copy(), cell_size, depth)


# ---------------------------------------------------------------------------
# clustering a color raster into legality classes

def cluster_map(
    raster,
    k: int = 3,
    *,
    water_color=WATER_REF_COLOR,
    land_color=LAND_REF_COLOR,
    seed: int = 0,
    cell_size_m: float = 100.0,
    depth_m: float = 100.0,
) -> TerrainGrid:
    """Classify a color raster into a TerrainGrid by k-means over pixel colors.

    Each pixel becomes one cell. After Lloyd iterations converge (or the
    100-iteration cap is hit), the cluster whose centroid lies nearest the
    water reference color becomes Water, the one nearest the land reference
    becomes Coast, and every other cluster becomes Uncertain. When both
    references pick the same cluster the closer reference keeps it and the
    other takes its next-nearest choice. All ties break toward the lowest
    cluster index so the result is reproducible.
    """
    raster = np.asarray(raster, dtype=float)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise ValueError("raster must have shape (H, W, 3)")
    if k < 2:
        raise ValueError("k must be at least 2")
    h, w, _ = raster.shape
    pixels = raster.reshape(-1, 3)
    if pixels.shape[0] < k:
        raise DegenerateClusteringError(
            f"raster has {pixels.shape[0]} pixels, fewer than k={k}"
        )

    rng = np.random.default_rng(seed)
    unique = np.unique(pixels, axis=0)
    if unique.shape[0] >= k:
        picks = rng.choice(unique.shape[0], size=k, replace=False)
        centroids = unique[np.sort(picks)].astype(float)
    else:
        # Too few distinct colors: pad by cycling. Surplus clusters end up empty.
        reps = [unique[i % unique.shape[0]] for i in range(k)]
        centroids = np.array(reps, dtype=float)

    assign = np.zeros(pixels.shape[0], dtype=np.int64)
    for _ in range(KMEANS_MAX_ITER):
        d2 = ((pixels[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assign = np.argmin(d2, axis=1)
        moved = 0.0
        for c in range(k):
            members = pixels[assign == c]
            if members.shape[0] == 0:
                continue
            new = members.mean(axis=0)
            moved = max(moved, float(np.abs(new - centroids[c]).max()))
            centroids[c] = new
        if moved < KMEANS_TOL:
            break

    d_water = ((centroids - np.asarray(water_color, dtype=float)) ** 2).sum(axis=1)
    d_land = ((centroids - np.asarray(land_color, dtype=float)) ** 2).sum(axis=1)
    water_idx = int(np.argmin(d_water))
    land_idx = int(np.argmin(d_land))
    if water_idx == land_idx:
        if d_land[land_idx] < d_water[water_idx]:
            water_idx = _next_nearest(d_water, exclude=land_idx)
        else:
            land_idx = _next_nearest(d_land, exclude=water_idx)

    class_of = np.full(k, CellClass.UNCERTAIN, dtype=np.uint8)
    class_of[water_idx] = CellClass.WATER
    class_of[land_idx] = CellClass.COAST
    cells = class_of[assign].reshape(h, w)
    return TerrainGrid(w * cell_size_m, h * cell_size_m, depth_m, cell_size_m, cells)


def _next_nearest(distances, exclude):
    order = np.argsort(distances, kind="stable")
    for idx in order:
        if int(idx) != exclude:
            return int(idx)
    raise ValueError("need at least two clusters")


# ---------------------------------------------------------------------------
# synthetic terrain

@dataclass(frozen=True)
class TerrainParams:
    """Knobs for synthetic island terrain.

    Island radii are drawn as a fraction of the smaller plan dimension.
    A one-cell uncertain fringe is grown around each island by default,
    mimicking imperfect shoreline classification.
    """

    width_m: float = 10000.0
    height_m: float = 10000.0
    depth_m: float = 100.0
    cell_size_m: float = 100.0
    island_count: int = 5
    min_radius_frac: float = 0.04
    max_radius_frac: float = 0.10
    lobes_per_island: int = 3
    fringe_cells: int = 1


def generate_synthetic_terrain(seed: int, params: TerrainParams = TerrainParams()) -> TerrainGrid:
    """Deterministic island terrain: mostly open water with blobby coast patches.

    Raises InfeasibleTerrainError when the requested islands drown more than
    90% of the plan area. Water pockets sealed off from the main body are
    reclassified as Uncertain so the remaining water region is connected.
    """
    if params.island_count < 0:
        raise ValueError("island_count must be non-negative")
    if not (0.0 < params.min_radius_frac <= params.max_radius_frac):
        raise ValueError("island radius fractions must satisfy 0 < min <= max")

    rng = np.random.default_rng(seed)
    nx = max(1, int(round(params.width_m / params.cell_size_m)))
    ny = max(1, int(round(params.height_m / params.cell_size_m)))
    cells = np.full((ny, nx), CellClass.WATER, dtype=np.uint8)

    # Cell-center coordinates for rasterizing discs.
    xs = (np.arange(nx) + 0.5) * params.cell_size_m
    ys = (np.arange(ny) + 0.5) * params.cell_size_m
    gx, gy = np.meshgrid(xs, ys)

    scale = min(params.width_m, params.height_m)
    for _ in range(params.island_count):
        cx = rng.uniform(0.12, 0.88) * params.width_m
        cy = rng.uniform(0.12, 0.88) * params.height_m
        base_r = rng.uniform(params.min_radius_frac, params.max_radius_frac) * scale
        coast = (gx - cx) ** 2 + (gy - cy) ** 2 <= base_r**2
        for _ in range(max(0, params.lobes_per_island - 1)):
            ang = rng.uniform(0.0, 2.0 * math.pi)
            off = rng.uniform(0.2, 0.6) * base_r
            lr = rng.uniform(0.5, 0.85) * base_r
            lx, ly = cx + off * math.cos(ang), cy + off * math.sin(ang)
            coast |= (gx - lx) ** 2 + (gy - ly) ** 2 <= lr**2
        cells[coast] = CellClass.COAST

    if params.fringe_cells > 0:
        coast_mask = cells == CellClass.COAST
        fringe = _dilate(coast_mask, params.fringe_cells) & ~coast_mask
        cells[fringe & (cells == CellClass.WATER)] = CellClass.UNCERTAIN

    _seal_disconnected_water(cells)

    grid = TerrainGrid.from_cells(cells, params.cell_size_m, params.depth_m)
    if grid.water_fraction() < 0.10:
        raise InfeasibleTerrainError(
            f"terrain params leave only {grid.water_fraction():.1%} water"
        )
    return grid


def _dilate(mask, steps):
    out = mask.copy()
    for _ in range(steps):
        grown = out.copy()
        grown[1:, :] |= out[:-1, :]
        grown[:-1, :] |= out[1:, :]
        grown[:, 1:] |= out[:, :-1]
        grown[:, :-1] |= out[:, 1:]
        out = grown
    return out


def _seal_disconnected_water(cells):
    """Keep only the largest 4-connected water component; others become Uncertain."""
    water = cells == CellClass.WATER
    if not water.any():
        return
    labels = np.zeros(cells.shape, dtype=np.int32)
    sizes = {}
    next_label = 0
    ny, nx = cells.shape
    for sy, sx in zip(*np.nonzero(water)):
        if labels[sy, sx]:
            continue
        next_label += 1
        queue = deque([(sy, sx)])
        labels[sy, sx] = next_label
        count = 0
        while queue:
            y, x = queue.popleft()
            count += 1
            for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                yy, xx = y + dy, x + dx
                if 0 <= yy < ny and 0 <= xx < nx and water[yy, xx] and not labels[yy, xx]:
                    labels[yy, xx] = next_label
                    queue.append((yy, xx))
        sizes[next_label] = count
    keep = max(sizes, key=lambda lbl: (sizes[lbl], -lbl))
    pockets = water & (labels != keep)
    cells[pockets] = CellClass.UNCERTAIN


# ---------------------------------------------------------------------------
# currents

@dataclass(frozen=True)
class Vortex:
    """One decaying planar vortex.

    strength is the circulation in m^2/s; positive spins counter-clockwise.
    radius sets the core size: the swirl speed peaks near the core edge and
    falls off as 1/r outside it.
    """

    center: tuple[float, float]
    radius: float
    strength: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("vortex radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


@dataclass(frozen=True)
class CurrentField:
    """Planar current field from superposed vortices. Purely horizontal."""

    vortices: tuple[Vortex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vortices", tuple(self.vortices))

    def velocity_at(self, xs, ys):
        """Vectorized (u, v) in m/s at the given horizontal positions."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        u = np.zeros(np.broadcast(xs, ys).shape)
        v = np.zeros_like(u)
        for vor in self.vortices:
            dx = xs - vor.center[0]
            dy = ys - vor.center[1]
            r2 = dx * dx + dy * dy
            near = r2 < VORTEX_CENTER_EPS_M**2
            safe_r2 = np.where(near, 1.0, r2)
            gain = (
                vor.strength
                / (2.0 * math.pi * safe_r2)
                * (1.0 - np.exp(-safe_r2 / vor.radius**2))
            )
            gain = np.where(near, 0.0, gain)
            u -= gain * dy
            v += gain * dx
        return u, v


def current_at(field: CurrentField, point) -> tuple[float, float]:
    """Current velocity (u, v) at a horizontal point.

    Each vortex contributes a swirl tangential to the circle through the
    query point; the exponential factor removes the singular core. Points
    within 1e-9 m of a center receive no contribution from that vortex.
    The field has no vertical component.
    """
    u, v = field.velocity_at(float(point[0]), float(point[1]))
    return float(u), float(v)


# ---------------------------------------------------------------------------
# obstacles

class ObstacleKind(IntEnum):
    STATIC = 0
    MOVING = 1


@dataclass(frozen=True)
class Obstacle:
    """Spherical obstacle with a position-uncertainty envelope.

    position/velocity are 3-D; uncertainty_rate is the one-sigma growth of
    the position error in m/s. Static obstacles must have zero velocity.
    """

    position: tuple[float, float, float]
    radius: float
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    uncertainty_rate: float = 0.0
    kind: ObstacleKind = ObstacleKind.STATIC

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        object.__setattr__(self, "velocity", tuple(float(c) for c in self.velocity))
        object.__setattr__(self, "kind", ObstacleKind(self.kind))
        if self.radius <= 0.0:
            raise ValueError("obstacle radius must be positive")
        if self.uncertainty_rate < 0.0:
            raise ValueError("uncertainty_rate must be non-negative")
        if self.kind == ObstacleKind.STATIC and any(c != 0.0 for c in self.velocity):
            raise ValueError("static obstacle cannot have velocity")


def obstacle_region_at(obstacle: Obstacle, t: float):
    """Center and conservative radius of the obstacle envelope at time t.

    The center moves with the obstacle velocity. The radius grows by
    Z98 * uncertainty_rate * t so the true position stays inside the
    returned sphere with 98% confidence under a circular Gaussian drift.
    """
    if t < 0.0:
        raise ValueError("time must be non-negative")
    center = np.asarray(obstacle.position) + np.asarray(obstacle.velocity) * t
    radius = obstacle.radius + Z98 * obstacle.uncertainty_rate * t
    return center, float(radius)
