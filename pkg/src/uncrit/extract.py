"""Uncertain critical points as same-type components of the singular patch graph."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Grid, dual_cell_polygon, dual_interval
from .patches import SingularPatchGraph, VertexArrangement
from .pltopo import Tag

__all__ = [
    "DisjointSet",
    "SupportRegion",
    "UncertainCriticalPoint",
    "Extraction",
    "uncertain_critical_points",
    "extract",
    "spatial_support",
    "locate",
    "sign_codes",
]


class DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if self.rank[a] < self.rank[b]:
            a, b = b, a
        self.parent[b] = a
        if self.rank[a] == self.rank[b]:
            self.rank[a] += 1


@dataclass(frozen=True)
class SupportRegion:
    """Domain projection: merged intervals (1D) or a shapely geometry (2D)."""

    dim: int
    intervals: tuple[tuple[float, float], ...] = ()
    geometry: object = None

    @property
    def measure(self) -> float:
        if self.dim == 1:
            return float(sum(hi - lo for lo, hi in self.intervals))
        return float(self.geometry.area)

    @property
    def n_components(self) -> int:
        if self.dim == 1:
            return len(self.intervals)
        return len(getattr(self.geometry, "geoms", [self.geometry]))

    def polygons(self) -> list[dict]:
        geoms = getattr(self.geometry, "geoms", [self.geometry])
        return [
            {"exterior": [list(c) for c in g.exterior.coords],
             "holes": [[list(c) for c in h.coords] for h in g.interiors]}
            for g in geoms
        ]


@dataclass(eq=False)
class UncertainCriticalPoint:
    id: int
    ctype: Tag
    patch_ids: tuple[int, ...]
    vertex_set: tuple[int, ...]
    connector_segments: tuple[tuple[int, int], ...]
    multiplicity_max: int = 1
    support: SupportRegion | None = None


def uncertain_critical_points(graph: SingularPatchGraph) -> list[UncertainCriticalPoint]:
    """Connected components over same-type edges, ordered by lowest member node id."""
    ds = DisjointSet(len(graph.nodes))
    for e in graph.edges:
        if e.same_type:
            ds.union(e.a, e.b)
    groups: dict[int, list[int]] = {}
    for k in range(len(graph.nodes)):
        groups.setdefault(ds.find(k), []).append(k)
    connectors: dict[int, set[tuple[int, int]]] = {}
    for e in graph.edges:
        if e.same_type and graph.nodes[e.a].vertex != graph.nodes[e.b].vertex:
            connectors.setdefault(ds.find(e.a), set()).update(e.shared_constraints)

    out = []
    for root, members in groups.items():
        members.sort()
        patches = [graph.nodes[k] for k in members]
        tags = {p.ctype.tag for p in patches}
        assert len(tags) == 1, "component mixes critical types"
        out.append(UncertainCriticalPoint(
            id=members[0],
            ctype=tags.pop(),
            patch_ids=tuple(members),
            vertex_set=tuple(sorted({p.vertex for p in patches})),
            connector_segments=tuple(sorted(connectors.get(root, ()))),
            multiplicity_max=max(p.ctype.multiplicity for p in patches),
        ))
    out.sort(key=lambda u: u.id)
    for u in out:
        u.support = spatial_support(u, graph.grid)
    return out


def spatial_support(ucp: UncertainCriticalPoint, grid: Grid) -> SupportRegion:
    """Union of the member vertices' dual cells and the connector hulls.

    Connectors join member vertices only, and a segment or triangle spanned by
    grid-adjacent vertices lies inside the union of their barycentric dual
    cells, so in 2D the dual cells already carry the connector hulls.
    """
    if grid.dim == 1:
        x = grid.vertices[:, 0]
        spans = [dual_interval(grid, v) for v in ucp.vertex_set]
        spans += [(float(min(x[i], x[j])), float(max(x[i], x[j]))) for i, j in ucp.connector_segments]
        spans.sort()
        merged: list[list[float]] = []
        for lo, hi in spans:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return SupportRegion(1, tuple((lo, hi) for lo, hi in merged))

    from shapely.geometry import Polygon
    from shapely.ops import unary_union

    cells = [Polygon(dual_cell_polygon(grid, v)) for v in ucp.vertex_set]
    return SupportRegion(2, geometry=unary_union(cells))


def sign_codes(arr: VertexArrangement, A: np.ndarray) -> np.ndarray:
    """Bit-packed tie-broken sign vectors of ``arr.vertex`` for parameter rows ``A``.

    Bit ``k`` is set when ring neighbor ``k`` lies above the vertex.
    """
    c0 = np.array([c.c0 for c in arr.constraints])
    C = np.array([c.c for c in arr.constraints]).reshape(len(c0), -1)
    ties = np.array([c.tie() for c in arr.constraints])
    D = c0 + A @ C.T
    up = np.where(D > 0, True, np.where(D < 0, False, ties > 0))
    weights = np.left_shift(np.int64(1), np.arange(len(c0), dtype=np.int64))
    return up.astype(np.int64) @ weights


def code_of(sign_vector) -> int:
    return sum(1 << k for k, s in enumerate(sign_vector) if s > 0)


@dataclass(eq=False)
class Extraction:
    graph: SingularPatchGraph
    ucps: list[UncertainCriticalPoint]
    component_of: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.component_of = {k: u.id for u in self.ucps for k in u.patch_ids}
        self._by_id = {u.id: u for u in self.ucps}
        tables = []
        for v, arr in enumerate(self.graph.arrangements):
            entries = sorted(
                (code_of(p.sign_vector), self.component_of[self.graph.node_of[(v, p.sign_vector)]])
                for p in arr.patches
                if (v, p.sign_vector) in self.graph.node_of
            )
            if entries:
                codes, ids = map(np.array, zip(*entries))
                tables.append((v, codes, ids))
        self._tables = tables

    def ucp(self, ucp_id: int) -> UncertainCriticalPoint:
        try:
            return self._by_id[ucp_id]
        except KeyError:
            raise KeyError(f"unknown uncertain critical point id {ucp_id}") from None

    def locate(self, v: int, a) -> int | None:
        arr = self.graph.arrangements[v]
        p = arr.locate(np.asarray(a, dtype=float))
        if p is None:
            return None
        node = self.graph.node_of.get((v, p.sign_vector))
        return None if node is None else self.component_of[node]

    def labels(self, A: np.ndarray) -> np.ndarray:
        """``(N, n)`` array of UCP ids manifesting at each vertex, -1 where none."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        out = np.full((A.shape[0], self.graph.grid.n), -1, dtype=np.int64)
        for v, codes, ids in self._tables:
            got = sign_codes(self.graph.arrangements[v], A)
            idx = np.searchsorted(codes, got)
            idx[idx == len(codes)] = 0
            hit = codes[idx] == got
            out[hit, v] = ids[idx[hit]]
        return out


def extract(graph: SingularPatchGraph) -> Extraction:
    return Extraction(graph, uncertain_critical_points(graph))


def locate(extraction: Extraction, v: int, a) -> int | None:
    return extraction.locate(v, a)
