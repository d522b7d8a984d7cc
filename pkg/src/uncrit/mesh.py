"""Simplicial grids: 1D paths and 2D triangulations.

A :class:`Grid` is immutable after construction and carries everything the
topology code needs per vertex: sorted neighbor lists, an ordered link ring,
a boundary flag and the barycentric dual-cell measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MeshError

__all__ = [
    "Grid",
    "Link",
    "build_line_grid",
    "build_triangle_grid",
    "link",
    "structured_triangle_grid",
    "delaunay_grid",
    "dual_cell_polygon",
    "dual_interval",
    "grid_to_dict",
    "grid_from_dict",
]


@dataclass(frozen=True)
class Link:
    center: int
    ring: tuple[int, ...]
    ring_edges: tuple[tuple[int, int], ...]
    closed: bool


@dataclass(frozen=True, eq=False)
class Grid:
    dim: int
    vertices: np.ndarray
    cells: np.ndarray
    neighbor_lists: tuple[tuple[int, ...], ...]
    boundary_flags: np.ndarray
    dual_areas: np.ndarray
    links: tuple[Link, ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def total_measure(self) -> float:
        if self.dim == 1:
            return float(self.vertices[-1, 0] - self.vertices[0, 0])
        return float(np.sum(_triangle_areas(self.vertices, self.cells)))

    def edges(self) -> list[tuple[int, int]]:
        """All grid edges ``(i, j)`` with ``i < j``, sorted."""
        return [(i, j) for i, nbrs in enumerate(self.neighbor_lists) for j in nbrs if i < j]


def build_line_grid(xs: Sequence[float]) -> Grid:
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size < 2:
        raise MeshError("a line grid needs at least two vertices")
    if not np.all(np.isfinite(xs)):
        raise MeshError("non-finite vertex coordinate")
    steps = np.diff(xs)
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        raise MeshError(f"coordinates not strictly increasing at index {int(bad[0]) + 1}")

    n = xs.size
    cells = np.column_stack([np.arange(n - 1), np.arange(1, n)])
    neighbors = tuple(tuple(j for j in (i - 1, i + 1) if 0 <= j < n) for i in range(n))
    boundary = np.zeros(n, dtype=bool)
    boundary[[0, -1]] = True
    dual = np.zeros(n)
    dual[:-1] += steps / 2
    dual[1:] += steps / 2
    links = tuple(Link(i, neighbors[i], (), False) for i in range(n))
    return _freeze(Grid(1, xs[:, None], cells, neighbors, boundary, dual, links))


def build_triangle_grid(points, triangles) -> Grid:
    pts = np.asarray(points, dtype=float)
    tris = np.asarray(triangles, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise MeshError("points must be an (n, 2) array")
    if tris.ndim != 2 or tris.shape[1] != 3 or len(tris) == 0:
        raise MeshError("triangles must be a non-empty (t, 3) array")
    n = len(pts)
    if tris.min() < 0 or tris.max() >= n:
        raise MeshError("triangle references an out-of-range vertex")
    for t, (a, b, c) in enumerate(tris):
        if a == b or b == c or a == c:
            raise MeshError(f"triangle {t} repeats a vertex")

    area = _signed_areas(pts, tris)
    scale = np.ptp(pts, axis=0).max() if n > 1 else 1.0
    flat = np.flatnonzero(np.abs(area) <= 1e-14 * scale**2)
    if flat.size:
        raise MeshError(f"degenerate (zero-area) triangle {int(flat[0])}: {tris[flat[0]].tolist()}")
    tris = tris.copy()
    cw = area < 0
    tris[cw] = tris[cw][:, [0, 2, 1]]

    edge_count: dict[tuple[int, int], int] = {}
    for a, b, c in tris:
        for u, v in ((a, b), (b, c), (c, a)):
            key = (min(u, v), max(u, v))
            edge_count[key] = edge_count.get(key, 0) + 1
    for key, cnt in edge_count.items():
        if cnt > 2:
            raise MeshError(f"non-manifold edge {key} shared by {cnt} triangles")

    boundary = np.zeros(n, dtype=bool)
    nbr_sets: list[set[int]] = [set() for _ in range(n)]
    for (u, v), cnt in edge_count.items():
        nbr_sets[u].add(v)
        nbr_sets[v].add(u)
        if cnt == 1:
            boundary[u] = boundary[v] = True

    # directed link edges: for a CCW triangle (a, b, c), b -> c runs CCW around a
    succ: list[dict[int, int]] = [{} for _ in range(n)]
    for a, b, c in tris:
        for v, p, q in ((a, b, c), (b, c, a), (c, a, b)):
            if p in succ[v]:
                raise MeshError(f"vertex {v} has a non-manifold link at neighbor {p}")
            succ[v][p] = q

    links = []
    for v in range(n):
        if not nbr_sets[v]:
            raise MeshError(f"vertex {v} is not referenced by any triangle")
        links.append(_ordered_link(v, succ[v], nbr_sets[v]))

    dual = np.zeros(n)
    np.add.at(dual, tris.ravel(), np.repeat(np.abs(area) / 3.0, 3))
    neighbors = tuple(tuple(sorted(s)) for s in nbr_sets)
    return _freeze(Grid(2, pts.copy(), tris, neighbors, boundary, dual, tuple(links)))


def _ordered_link(v: int, succ: dict[int, int], nbrs: set[int]) -> Link:
    preds = set(succ.values())
    starts = [p for p in succ if p not in preds]
    closed = not starts
    if closed:
        start = min(nbrs)
    elif len(starts) == 1:
        start = starts[0]
    else:
        raise MeshError(f"link of vertex {v} is not a single path or cycle")
    ring = [start]
    cur = start
    while cur in succ:
        nxt = succ[cur]
        if nxt == start:
            break
        ring.append(nxt)
        cur = nxt
    if len(ring) != len(nbrs):
        raise MeshError(f"link of vertex {v} is not a single path or cycle")
    edges = [(ring[k], ring[k + 1]) for k in range(len(ring) - 1)]
    if closed:
        edges.append((ring[-1], ring[0]))
    return Link(v, tuple(ring), tuple(edges), closed)


def link(grid: Grid, v: int) -> Link:
    if not 0 <= v < grid.n:
        raise IndexError(f"vertex {v} out of range [0, {grid.n})")
    return grid.links[v]


def _signed_areas(pts, tris):
    a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def _triangle_areas(pts, tris):
    return np.abs(_signed_areas(pts, tris))


def _freeze(grid: Grid) -> Grid:
    for arr in (grid.vertices, grid.cells, grid.boundary_flags, grid.dual_areas):
        arr.setflags(write=False)
    return grid


# ---------------------------------------------------------------- builders


def structured_triangle_grid(nx: int, ny: int, xlim=(0.0, 1.0), ylim=(0.0, 1.0)) -> Grid:
    """Regular ``nx`` x ``ny`` vertex lattice, each quad split along the same diagonal.

    Interior vertices get exactly six neighbors.
    """
    if nx < 2 or ny < 2:
        raise MeshError("structured grid needs at least 2x2 vertices")
    xs = np.linspace(*xlim, nx)
    ys = np.linspace(*ylim, ny)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    tris = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            v00 = j * nx + i
            v10, v01, v11 = v00 + 1, v00 + nx, v00 + nx + 1
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    return build_triangle_grid(pts, tris)


def delaunay_grid(points) -> Grid:
    from scipy.spatial import Delaunay

    pts = np.asarray(points, dtype=float)
    return build_triangle_grid(pts, Delaunay(pts).simplices)


# ---------------------------------------------------------------- dual cells


def dual_interval(grid: Grid, v: int) -> tuple[float, float]:
    x = grid.vertices[:, 0]
    lo = x[v] if v == 0 else 0.5 * (x[v - 1] + x[v])
    hi = x[v] if v == grid.n - 1 else 0.5 * (x[v] + x[v + 1])
    return float(lo), float(hi)


def dual_cell_polygon(grid: Grid, v: int) -> np.ndarray:
    """Barycentric dual cell of a 2D vertex as a CCW polygon (k, 2)."""
    if grid.dim != 2:
        raise ValueError("dual_cell_polygon needs a 2D grid")
    P = grid.vertices
    lk = grid.links[v]
    x = P[v]
    out = [] if lk.closed else [x]
    for p, q in lk.ring_edges:
        out.append(0.5 * (x + P[p]))
        out.append((x + P[p] + P[q]) / 3.0)
    if not lk.closed:
        out.append(0.5 * (x + P[lk.ring[-1]]))
    return np.asarray(out)


# ---------------------------------------------------------------- JSON


def grid_to_dict(grid: Grid) -> dict:
    return {
        "dim": grid.dim,
        "vertices": grid.vertices.tolist(),
        "cells": grid.cells.tolist(),
    }


def grid_from_dict(data: dict) -> Grid:
    try:
        dim = int(data["dim"])
        verts = np.asarray(data["vertices"], dtype=float)
        cells = data["cells"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MeshError(f"malformed grid JSON: {exc}") from exc
    if dim == 1:
        xs = verts.ravel()
        grid = build_line_grid(xs)
        expected = [[i, i + 1] for i in range(len(xs) - 1)]
        if cells and [list(map(int, c)) for c in cells] != expected:
            raise MeshError("1D cells must be consecutive segments")
        return grid
    if dim == 2:
        return build_triangle_grid(verts, cells)
    raise MeshError(f"unsupported grid dimension {dim}")
