"""Parameter-space patches of each vertex and the singular patch graph.

For a vertex ``v`` every link neighbor ``j`` contributes the affine function
``delta_vj(a) = f_{a;j} - f_{a;v}``. Its zero set is a hyperplane in parameter
space; the arrangement of these hyperplanes cuts parameter space into open
cells on which ``v``'s link signs (and hence its critical type) are constant.
The closures of those cells are the patches of ``v``. Singular patches of the
same or neighboring vertices are joined in a graph whenever their closures
meet in a common change event.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .family import LinearFamily
from .lp import EPS_FEAS
from .mesh import Grid, Link
from .pltopo import CriticalType, classify, tie_sign

log = logging.getLogger(__name__)

__all__ = [
    "Constraint",
    "Patch",
    "VertexArrangement",
    "GraphEdge",
    "SingularPatchGraph",
    "constraint",
    "arrangement",
    "enumerate_patches",
    "is_adjacent",
    "build_patch_graph",
    "M_SOFT_CAP",
]

M_SOFT_CAP = 4
# normalized hyperplanes closer than this are merged before building cells
DEDUP_TOL = 25 * EPS_FEAS
WITNESS_SLACK = 10 * EPS_FEAS


@dataclass(frozen=True, eq=False)
class Constraint:
    """``delta(a) = c0 + <c, a> = f_{a;j} - f_{a;i}``."""

    i: int
    j: int
    c0: float
    c: np.ndarray

    @property
    def degenerate(self) -> bool:
        return self.c0 == 0 and not np.any(self.c)

    @property
    def constant(self) -> bool:
        return not np.any(self.c)

    def value(self, a) -> float:
        return self.c0 + float(np.dot(self.c, a))

    def tie(self) -> int:
        return tie_sign(self.i, self.j, self.c0, self.c)


def constraint(family: LinearFamily, i: int, j: int) -> Constraint:
    if i == j:
        raise ValueError("constraint needs two distinct vertices")
    n = family.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"vertex pair ({i}, {j}) out of range")
    col = family.g[:, j] - family.g[:, i]
    c = col[1:].copy()
    c.setflags(write=False)
    return Constraint(i, j, float(col[0]), c)


@dataclass(eq=False)
class VertexArrangement:
    """Deduplicated hyperplanes of one vertex.

    ``R``/``b`` hold unit-normal rows ``b + R a`` of the distinct hyperplanes,
    oriented so the last nonzero normal component is positive. ``members[p]``
    lists ``(ring position, orientation)`` of the constraints on plane ``p``;
    ``fixed`` maps ring positions of constant constraints to their sign.
    """

    vertex: int
    link: Link
    constraints: list[Constraint]
    R: np.ndarray
    b: np.ndarray
    members: list[list[tuple[int, int]]]
    fixed: dict[int, int]
    plane_of: dict[int, int]
    patches: list["Patch"] = field(default_factory=list)
    by_signs: dict[tuple[int, ...], "Patch"] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.R.shape[1]

    def expand(self, plane_signs) -> tuple[int, ...]:
        sv = [0] * len(self.link.ring)
        for pos, s in self.fixed.items():
            sv[pos] = s
        for p, s in enumerate(plane_signs):
            for pos, orient in self.members[p]:
                sv[pos] = orient * s
        return tuple(sv)

    def signs_at(self, a) -> tuple[int, ...]:
        """Tie-broken link sign vector of the realization at ``a``."""
        out = []
        for con in self.constraints:
            val = con.value(a)
            out.append(1 if val > 0 else -1 if val < 0 else con.tie())
        return tuple(out)

    def locate(self, a) -> "Patch | None":
        return self.by_signs.get(self.signs_at(a))


@dataclass(eq=False)
class Patch:
    vertex: int
    sign_vector: tuple[int, ...]
    ctype: CriticalType
    active_constraints: tuple[int, ...]
    witness: np.ndarray
    id: int
    plane_signs: tuple[int, ...]
    arr: VertexArrangement = field(repr=False)
    interval: tuple[float, float] | None = None

    @property
    def singular(self) -> bool:
        return self.ctype.singular

    def rows(self, strict_margin: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """Halfspace rows ``b + R a >= 0`` describing the closed patch."""
        s = np.asarray(self.plane_signs, dtype=float)
        return self.arr.R * s[:, None], self.arr.b * s

    def contains(self, a, strict: bool = True) -> bool:
        R, b = self.rows()
        vals = b + R @ np.asarray(a, dtype=float)
        return bool(np.all(vals > 0)) if strict else bool(np.all(vals >= -EPS_FEAS))


# ---------------------------------------------------------------- arrangement


def _canonical(c0: float, c: np.ndarray) -> tuple[float, np.ndarray, int]:
    norm = float(np.linalg.norm(c))
    r = c / norm
    b = c0 / norm
    nz = np.flatnonzero(r)
    orient = 1 if r[nz[-1]] > 0 else -1
    return b * orient, r * orient, orient


def arrangement(family: LinearFamily, grid: Grid, v: int) -> VertexArrangement:
    lk = grid.links[v]
    cons = [constraint(family, v, j) for j in lk.ring]
    fixed: dict[int, int] = {}
    R_rows: list[np.ndarray] = []
    b_rows: list[float] = []
    members: list[list[tuple[int, int]]] = []
    plane_of: dict[int, int] = {}
    for pos, con in enumerate(cons):
        if con.constant:
            fixed[pos] = con.tie() if con.c0 == 0 else (1 if con.c0 > 0 else -1)
            continue
        b, r, orient = _canonical(con.c0, con.c)
        for p, (r2, b2) in enumerate(zip(R_rows, b_rows)):
            if abs(b - b2) <= DEDUP_TOL * max(1.0, abs(b)) and np.max(np.abs(r - r2)) <= DEDUP_TOL:
                members[p].append((pos, orient))
                plane_of[pos] = p
                break
        else:
            plane_of[pos] = len(R_rows)
            R_rows.append(r)
            b_rows.append(b)
            members.append([(pos, orient)])
    m = family.m
    R = np.array(R_rows).reshape(len(R_rows), m)
    return VertexArrangement(v, lk, cons, R, np.array(b_rows), members, fixed, plane_of)


def _cells_1d(arr: VertexArrangement):
    """Left-to-right sweep over sorted breakpoints (m == 1)."""
    k = len(arr.b)
    if k == 0:
        return [((), np.zeros(1), (-np.inf, np.inf))]
    # canonical normals are +1, so plane p is zero at a = -b[p] and negative to its left
    bps = -arr.b
    order = np.argsort(bps, kind="stable")
    sb = bps[order]
    spread = max(1.0, float(sb[-1] - sb[0]))
    signs = [-1] * k  # a -> -inf: every delta has the sign of -c, i.e. the lower link of -g1
    cells = []
    lo = -np.inf
    for idx, p in enumerate(order):
        hi = sb[idx]
        w = hi - spread if lo == -np.inf else 0.5 * (lo + hi)
        cells.append((tuple(signs), np.array([w]), (lo, hi)))
        signs[p] = 1
        lo = hi
    cells.append((tuple(signs), np.array([lo + spread]), (lo, np.inf)))
    return cells


def _clip(poly: np.ndarray, vals: np.ndarray, keep_positive: bool) -> np.ndarray:
    s = vals if keep_positive else -vals
    out = []
    n = len(poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        sp, sq = s[k], s[(k + 1) % n]
        if sp >= 0:
            out.append(p)
        if (sp > 0 > sq) or (sp < 0 < sq):
            t = sp / (sp - sq)
            out.append(p + t * (q - p))
    return np.asarray(out)


def _polygon_centroid(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cross = x * ys - xs * y
    area = cross.sum() / 2
    if abs(area) < 1e-300:
        return poly.mean(axis=0)
    return np.array([((x + xs) * cross).sum(), ((y + ys) * cross).sum()]) / (6 * area)


def _cells_2d(arr: VertexArrangement):
    """Incremental arrangement of lines, cells kept as box-clipped convex polygons."""
    R, b = arr.R, arr.b
    k = len(b)
    if k == 0:
        return [((), np.zeros(2), None)]
    pts = [-b[p] * R[p] for p in range(k)]
    for p in range(k):
        for q in range(p + 1, k):
            M = np.array([R[p], R[q]])
            det = np.linalg.det(M)
            if abs(det) > 1e-12:
                pts.append(np.linalg.solve(M, [-b[p], -b[q]]))
    rad = 2.0 * max(1.0, float(np.max(np.abs(pts)))) + 1.0
    box = np.array([[-rad, -rad], [rad, -rad], [rad, rad], [-rad, rad]])
    cells = [((), box)]
    for p in range(k):
        nxt = []
        for signs, poly in cells:
            vals = b[p] + poly @ R[p]
            hi, lo = vals.max(), vals.min()
            if hi > EPS_FEAS and lo < -EPS_FEAS:
                nxt.append((signs + (-1,), _clip(poly, vals, False)))
                nxt.append((signs + (1,), _clip(poly, vals, True)))
            else:
                nxt.append((signs + ((1,) if hi > EPS_FEAS else (-1,)), poly))
        cells = nxt
    out = []
    for signs, poly in cells:
        w = _polygon_centroid(poly)
        out.append((signs, w, None))
    return out


def _cells_search(arr: VertexArrangement):
    """Depth-first search over plane sign vectors, pruning infeasible prefixes by LP."""
    R, b = arr.R, arr.b
    k, m = R.shape
    if k == 0:
        return [((), np.zeros(m), None)]
    out = []

    def rec(signs: tuple[int, ...], wit: np.ndarray, slack: float):
        d = len(signs)
        if d == k:
            out.append((signs, wit, None))
            return
        val = b[d] + R[d] @ wit
        first = 1 if val > 0 else -1
        for s in (first, -first):
            child = signs + (s,)
            if s == first and min(slack, abs(val)) > WITNESS_SLACK:
                rec(child, wit, min(slack, abs(val)))
                continue
            sv = np.asarray(child, dtype=float)
            ok, a, t = lp.strictly_feasible(R[: d + 1] * sv[:, None], b[: d + 1] * sv)
            if ok:
                rec(child, a, t)

    rec((), np.zeros(m), np.inf)
    return out


def enumerate_patches(family: LinearFamily, grid: Grid, v: int, method: str = "auto") -> list[Patch]:
    """All full-dimensional cells of ``v``'s arrangement as patches.

    ``method`` is ``"auto"`` (sweep for m == 1, polygon splitting for m == 2,
    LP-pruned search otherwise), or ``"search"`` to force the LP route.
    """
    return _build(arrangement(family, grid, v), method).patches


def _build(arr: VertexArrangement, method: str = "auto") -> VertexArrangement:
    m = arr.m
    if m > M_SOFT_CAP:
        warnings.warn(f"parameter dimension m={m} exceeds {M_SOFT_CAP}; cell counts grow like k**m",
                      RuntimeWarning, stacklevel=3)
    if method == "search":
        raw = _cells_search(arr)
    elif m == 1:
        raw = _cells_1d(arr)
    elif m == 2:
        raw = _cells_2d(arr)
    else:
        raw = _cells_search(arr)

    cells = []
    for signs, wit, interval in raw:
        sv = np.asarray(signs, dtype=float)
        Rs, bs = arr.R * sv[:, None], arr.b * sv
        slack = float(np.min(bs + Rs @ wit)) if len(bs) else np.inf
        if slack <= WITNESS_SLACK:
            ok, a, t = lp.strictly_feasible(Rs, bs)
            if not ok:
                log.debug("vertex %d: dropping sliver cell %s (slack %.3g)", arr.vertex, signs, t)
                continue
            wit = a
        cells.append((signs, wit, interval))

    present = {c[0] for c in cells}
    expanded = sorted(((arr.expand(s), s, w, iv) for s, w, iv in cells), key=lambda t: t[0])
    patches = []
    for pid, (sv, signs, wit, iv) in enumerate(expanded):
        active = []
        for p in range(len(signs)):
            flipped = signs[:p] + (-signs[p],) + signs[p + 1:]
            if flipped in present:
                active.extend(pos for pos, _ in arr.members[p])
        patches.append(Patch(
            vertex=arr.vertex,
            sign_vector=sv,
            ctype=classify(arr.link, sv),
            active_constraints=tuple(sorted(active)),
            witness=np.asarray(wit, dtype=float),
            id=pid,
            plane_signs=signs,
            arr=arr,
            interval=iv,
        ))
    arr.patches = patches
    arr.by_signs = {p.sign_vector: p for p in patches}
    return arr


# ---------------------------------------------------------------- adjacency


def _strict_overlap(p: Patch, q: Patch) -> bool:
    if p.interval is not None and q.interval is not None:
        lo = max(p.interval[0], q.interval[0])
        hi = min(p.interval[1], q.interval[1])
        return hi - lo > 2 * EPS_FEAS
    R1, b1 = p.rows()
    R2, b2 = q.rows()
    ok, _, _ = lp.strictly_feasible(np.vstack([R1, R2]), np.concatenate([b1, b2]))
    return ok


def is_adjacent(p: Patch, q: Patch, family: LinearFamily | None = None) -> tuple[bool, tuple[tuple[int, int], ...]]:
    """Whether closed patches ``p`` and ``q`` meet in a face of dimension < m.

    Same vertex: the closures intersect. Neighboring vertices ``i``, ``j``: the
    closures meet on the hyperplane ``f_i == f_j`` and their interiors are
    disjoint. Returns the flag and the ``(i, j)`` constraint pairs shared.
    """
    if p.arr.m != q.arr.m:
        raise ValueError("patches come from families of different dimension")
    if p.vertex == q.vertex:
        if p.plane_signs == q.plane_signs:
            return False, ()
        diff = [k for k, (s, t) in enumerate(zip(p.plane_signs, q.plane_signs)) if s != t]
        same = [k for k in range(len(p.plane_signs)) if k not in diff]
        R, b = p.rows()
        ok = lp.weakly_feasible(R[same], b[same], p.arr.R[diff], p.arr.b[diff])
        shared = tuple((p.vertex, p.arr.link.ring[pos]) for k in diff for pos, _ in p.arr.members[k])
        return ok, tuple(sorted(shared))

    i, j = p.vertex, q.vertex
    ring_i, ring_j = p.arr.link.ring, q.arr.link.ring
    if j not in ring_i or i not in ring_j:
        raise ValueError(f"vertices {i} and {j} are not grid neighbors")
    pos_ij = ring_i.index(j)
    pos_ji = ring_j.index(i)
    if pos_ij not in p.arr.plane_of:
        # f_j - f_i does not depend on a: the pair never swaps order
        return False, ()
    plane = p.arr.plane_of[pos_ij]
    R1, b1 = p.rows()
    R2, b2 = q.rows()
    ok = lp.weakly_feasible(np.vstack([R1, R2]), np.concatenate([b1, b2]),
                            p.arr.R[plane:plane + 1], p.arr.b[plane:plane + 1])
    if not ok:
        return False, ()
    # both patches on the same side of f_i == f_j: they must not share interior
    if p.sign_vector[pos_ij] != q.sign_vector[pos_ji] and _strict_overlap(p, q):
        return False, ()
    return True, ((min(i, j), max(i, j)),)


# ---------------------------------------------------------------- graph


@dataclass(frozen=True)
class GraphEdge:
    a: int
    b: int
    same_type: bool
    shared_constraints: tuple[tuple[int, int], ...]


@dataclass(eq=False)
class SingularPatchGraph:
    family: LinearFamily
    grid: Grid
    arrangements: list[VertexArrangement]
    nodes: list[Patch]
    edges: list[GraphEdge]
    include_boundary: bool
    node_of: dict[tuple[int, tuple[int, ...]], int]

    def neighbors(self, node: int) -> list[int]:
        return self._adj[node]

    def __post_init__(self):
        adj: list[list[int]] = [[] for _ in self.nodes]
        for e in self.edges:
            adj[e.a].append(e.b)
            adj[e.b].append(e.a)
        self._adj = adj

    def suppressed(self, v: int) -> bool:
        return (not self.include_boundary) and bool(self.grid.boundary_flags[v])


def build_patch_graph(family: LinearFamily, grid: Grid, include_boundary: bool = False,
                      method: str = "auto") -> SingularPatchGraph:
    if family.n != grid.n:
        raise ValueError(f"family has {family.n} vertices, grid has {grid.n}")
    arrs = [_build(arrangement(family, grid, v), method) for v in range(grid.n)]

    nodes: list[Patch] = []
    node_of: dict[tuple[int, tuple[int, ...]], int] = {}
    per_vertex: list[list[int]] = [[] for _ in range(grid.n)]
    for v, arr in enumerate(arrs):
        if not include_boundary and grid.boundary_flags[v]:
            continue
        for p in arr.patches:  # already sorted by sign vector
            if p.singular:
                node_of[(v, p.sign_vector)] = len(nodes)
                per_vertex[v].append(len(nodes))
                nodes.append(p)

    edges: list[GraphEdge] = []

    def add(x: int, y: int):
        ok, shared = is_adjacent(nodes[x], nodes[y], family)
        if ok:
            edges.append(GraphEdge(x, y, nodes[x].ctype.tag is nodes[y].ctype.tag, shared))

    for v in range(grid.n):
        ids = per_vertex[v]
        for s in range(len(ids)):
            for t in range(s + 1, len(ids)):
                add(ids[s], ids[t])
    for i, j in grid.edges():
        for x in per_vertex[i]:
            for y in per_vertex[j]:
                add(x, y)
    edges.sort(key=lambda e: (e.a, e.b))
    return SingularPatchGraph(family, grid, arrs, nodes, edges, include_boundary, node_of)
