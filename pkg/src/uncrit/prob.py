"""Monte-Carlo occurrence probabilities of uncertain critical points.

All quantities of one query are computed from a single parameter stream
(common random numbers), so identities such as inclusion-exclusion and
monotonicity hold exactly on the estimates. Per-vertex labels are evaluated in
chunks to bound memory; chunking does not change the stream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .extract import Extraction, code_of, sign_codes
from .family import ParameterDistribution, sample_parameters
from .mesh import Grid
from .patches import Patch

__all__ = [
    "DEFAULT_SAMPLES",
    "ProbabilityEstimate",
    "JointEstimate",
    "Region",
    "DensityField",
    "region_probability",
    "joint_probability",
    "patch_probability",
    "density_field",
    "density_fields",
    "multi_manifestation",
    "query_batch",
]

DEFAULT_SAMPLES = 20_000
CHUNK = 4096
MIN_SAMPLES = 100


@dataclass(frozen=True)
class ProbabilityEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    note: str = ""

    @classmethod
    def from_hits(cls, hits: int, n: int, seed: int, note: str = "") -> "ProbabilityEstimate":
        p = hits / n
        return cls(p, float(np.sqrt(p * (1 - p) / n)), n, seed, note)

    def to_dict(self) -> dict:
        d = {"value": self.value, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}
        if self.note:
            d["note"] = self.note
        return d


@dataclass(frozen=True)
class JointEstimate:
    joint: ProbabilityEstimate
    first: ProbabilityEstimate
    second: ProbabilityEstimate
    union: ProbabilityEstimate

    @property
    def delta(self) -> float:
        """``p1 + p2 - p(union) - p(joint)``; zero up to rounding on a shared stream."""
        return self.first.value + self.second.value - self.union.value - self.joint.value

    def to_dict(self) -> dict:
        return {"joint": self.joint.to_dict(), "first": self.first.to_dict(),
                "second": self.second.to_dict(), "union": self.union.to_dict(), "delta": self.delta}


def _half_open_inside(points: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Even-odd test with half-open edges.

    An edge counts when exactly one endpoint lies strictly above the point's
    y; crossings are taken at ``x_point < x_edge``. Points on a shared edge of
    two tiles therefore fall into exactly one of them.
    """
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(ring)
    for k in range(n):
        (x1, y1), (x2, y2) = ring[k], ring[(k + 1) % n]
        if y1 == y2:
            continue
        straddle = (y1 > y) != (y2 > y)
        xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= straddle & (x < xc)
    return inside


@dataclass(frozen=True)
class Region:
    """A set of grid vertices: explicit ids, half-open intervals, or a polygon."""

    kind: str
    vertices: tuple[int, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()
    polygon: tuple[tuple[float, float], ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("vertices", "intervals", "polygon"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        for lo, hi in self.intervals:
            if not hi >= lo:
                raise ValueError(f"interval [{lo}, {hi}) is reversed")

    @classmethod
    def of_vertices(cls, ids: Sequence[int], name: str = "") -> "Region":
        return cls("vertices", vertices=tuple(int(v) for v in ids), name=name)

    @classmethod
    def of_intervals(cls, spans, name: str = "") -> "Region":
        return cls("intervals", intervals=tuple((float(lo), float(hi)) for lo, hi in spans), name=name)

    @classmethod
    def of_polygon(cls, ring, name: str = "") -> "Region":
        return cls("polygon", polygon=tuple((float(x), float(y)) for x, y in ring), name=name)

    def mask(self, grid: Grid) -> np.ndarray:
        out = np.zeros(grid.n, dtype=bool)
        if self.kind == "vertices":
            ids = np.asarray(self.vertices, dtype=int)
            if ids.size and (ids.min() < 0 or ids.max() >= grid.n):
                raise IndexError("region vertex id out of range")
            out[ids] = True
        elif self.kind == "intervals":
            if grid.dim != 1:
                raise ValueError("interval regions need a 1D grid")
            x = grid.vertices[:, 0]
            for lo, hi in self.intervals:
                out |= (x >= lo) & (x < hi)
        else:
            if grid.dim != 2:
                raise ValueError("polygon regions need a 2D grid")
            out = _half_open_inside(grid.vertices, np.asarray(self.polygon, dtype=float))
        return out

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "vertices":
            d["vertices"] = list(self.vertices)
        elif self.kind == "intervals":
            d["intervals"] = [list(s) for s in self.intervals]
        else:
            d["polygon"] = [list(p) for p in self.polygon]
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Region":
        kind = d.get("kind")
        if kind is None:
            kind = next((k for k in ("vertices", "intervals", "polygon") if k in d), None)
        if kind == "vertices":
            return cls.of_vertices(d["vertices"], d.get("name", ""))
        if kind == "intervals":
            return cls.of_intervals(d["intervals"], d.get("name", ""))
        if kind == "polygon":
            return cls.of_polygon(d["polygon"], d.get("name", ""))
        raise ValueError(f"cannot read region {d!r}")


@dataclass(frozen=True, eq=False)
class DensityField:
    ucp_id: int
    values: np.ndarray
    vertex_probability: np.ndarray
    dual_areas: np.ndarray
    samples: int
    seed: int
    note: str = field(default="support within a cell approximated by the full dual cell")


def _check(N: int):
    if N < 1:
        raise ValueError("sample count must be positive")
    if N < MIN_SAMPLES:
        warnings.warn(f"only {N} Monte-Carlo samples; estimates will be noisy", stacklevel=3)


def _dist(extraction: Extraction, dist):
    return dist if dist is not None else ParameterDistribution(extraction.graph.family.m)


def _label_chunks(extraction: Extraction, dist, N: int, seed: int) -> Iterator[np.ndarray]:
    A = sample_parameters(_dist(extraction, dist), N, seed)
    for s in range(0, N, CHUNK):
        yield extraction.labels(A[s:s + CHUNK])


def _region_hits(extraction: Extraction, ucp_id: int, masks: list[np.ndarray], dist, N, seed) -> np.ndarray:
    """Boolean ``(N, len(masks))``: does the UCP manifest inside each region."""
    extraction.ucp(ucp_id)
    out = np.zeros((N, len(masks)), dtype=bool)
    s = 0
    for lab in _label_chunks(extraction, dist, N, seed):
        hit = lab == ucp_id
        for k, m in enumerate(masks):
            out[s:s + len(lab), k] = hit[:, m].any(axis=1)
        s += len(lab)
    return out


def region_probability(extraction: Extraction, ucp_id: int, region: Region,
                       dist: ParameterDistribution | None = None, N: int = DEFAULT_SAMPLES,
                       seed: int = 0) -> ProbabilityEstimate:
    _check(N)
    mask = region.mask(extraction.graph.grid)
    if not mask.any():
        extraction.ucp(ucp_id)
        return ProbabilityEstimate(0.0, 0.0, N, seed, "region contains no grid vertex")
    hits = _region_hits(extraction, ucp_id, [mask], dist, N, seed)
    return ProbabilityEstimate.from_hits(int(hits.sum()), N, seed)


def joint_probability(extraction: Extraction, ucp_id: int, first: Region, second: Region,
                      dist: ParameterDistribution | None = None, N: int = DEFAULT_SAMPLES,
                      seed: int = 0) -> JointEstimate:
    _check(N)
    grid = extraction.graph.grid
    m1, m2 = first.mask(grid), second.mask(grid)
    h = _region_hits(extraction, ucp_id, [m1, m2], dist, N, seed)
    est = lambda k: ProbabilityEstimate.from_hits(int(k), N, seed)  # noqa: E731
    return JointEstimate(
        joint=est((h[:, 0] & h[:, 1]).sum()),
        first=est(h[:, 0].sum()),
        second=est(h[:, 1].sum()),
        union=est((h[:, 0] | h[:, 1]).sum()),
    )


def patch_probability(patch: Patch, dist: ParameterDistribution | None = None,
                      N: int = DEFAULT_SAMPLES, seed: int = 0) -> ProbabilityEstimate:
    """Fraction of samples whose tie-broken sign vector at the patch's vertex matches it."""
    _check(N)
    dist = dist if dist is not None else ParameterDistribution(patch.arr.m)
    A = sample_parameters(dist, N, seed)
    if not patch.arr.constraints:
        return ProbabilityEstimate.from_hits(N, N, seed, "no hyperplanes: patch covers the parameter space")
    target = code_of(patch.sign_vector)
    hits = sum(int((sign_codes(patch.arr, A[s:s + CHUNK]) == target).sum()) for s in range(0, N, CHUNK))
    return ProbabilityEstimate.from_hits(hits, N, seed)


def density_field(extraction: Extraction, ucp_id: int, dist: ParameterDistribution | None = None,
                  N: int = DEFAULT_SAMPLES, seed: int = 0) -> DensityField:
    """Vertex probability of the UCP divided by the vertex's dual-cell measure."""
    return density_fields(extraction, [ucp_id], dist, N, seed)[0]


def density_fields(extraction: Extraction, ucp_ids: Sequence[int], dist: ParameterDistribution | None = None,
                   N: int = DEFAULT_SAMPLES, seed: int = 0) -> list[DensityField]:
    """``density_field`` for several UCPs from one labelling pass."""
    _check(N)
    ucps = [extraction.ucp(u) for u in ucp_ids]
    grid = extraction.graph.grid
    counts = np.zeros((len(ucps), grid.n), dtype=np.int64)
    row = {u.id: k for k, u in enumerate(ucps)}
    for lab in _label_chunks(extraction, dist, N, seed):
        for v in range(grid.n):
            ids, cnt = np.unique(lab[:, v], return_counts=True)
            for i, c in zip(ids.tolist(), cnt.tolist()):
                k = row.get(i)
                if k is not None:
                    counts[k, v] += c
    areas = np.asarray(grid.dual_areas, dtype=float)
    out = []
    for k, u in enumerate(ucps):
        prob = counts[k] / N
        values = np.zeros(grid.n)
        members = np.asarray(u.vertex_set, dtype=int)
        values[members] = prob[members] / areas[members]
        out.append(DensityField(u.id, values, prob, areas, N, seed))
    return out


def multi_manifestation(extraction: Extraction, ucp_id: int, dist: ParameterDistribution | None = None,
                        N: int = DEFAULT_SAMPLES, seed: int = 0, at_least: int = 2) -> ProbabilityEstimate:
    """Fraction of realizations in which the UCP shows up at ``at_least`` distinct vertices."""
    _check(N)
    extraction.ucp(ucp_id)
    hits = 0
    for lab in _label_chunks(extraction, dist, N, seed):
        hits += int(((lab == ucp_id).sum(axis=1) >= at_least).sum())
    return ProbabilityEstimate.from_hits(hits, N, seed)


def query_batch(extraction: Extraction, ucp_ids: Sequence[int], regions: Sequence[Region],
                dist: ParameterDistribution | None = None, N: int = DEFAULT_SAMPLES, seed: int = 0,
                joints: bool = True) -> dict:
    """Totals, per-region and pairwise joint estimates for several UCPs on one stream."""
    _check(N)
    for u in ucp_ids:
        extraction.ucp(u)
    grid = extraction.graph.grid
    masks = [r.mask(grid) for r in regions]
    R = len(masks)
    ids = list(ucp_ids)
    anywhere = np.zeros((N, len(ids)), dtype=bool)
    multi = np.zeros((N, len(ids)), dtype=bool)
    inside = np.zeros((N, len(ids), R), dtype=bool)
    s = 0
    for lab in _label_chunks(extraction, dist, N, seed):
        e = s + len(lab)
        for k, u in enumerate(ids):
            hit = lab == u
            cnt = hit.sum(axis=1)
            anywhere[s:e, k] = cnt > 0
            multi[s:e, k] = cnt >= 2
            for r, m in enumerate(masks):
                inside[s:e, k, r] = hit[:, m].any(axis=1)
        s = e

    def est(x, note=""):
        return ProbabilityEstimate.from_hits(int(x), N, seed, note).to_dict()

    out = []
    for k, u in enumerate(ids):
        entry = {
            "ucp": u,
            "total": est(anywhere[:, k].sum()),
            "multiple_vertices": est(multi[:, k].sum()),
            "regions": [
                dict(region=regions[r].to_dict(),
                     **est(inside[:, k, r].sum(), "" if masks[r].any() else "region contains no grid vertex"))
                for r in range(R)
            ],
        }
        if joints and R > 1:
            entry["joints"] = [
                {"first": r1, "second": r2,
                 "joint": est((inside[:, k, r1] & inside[:, k, r2]).sum()),
                 "union": est((inside[:, k, r1] | inside[:, k, r2]).sum())}
                for r1 in range(R) for r2 in range(r1 + 1, R)
            ]
        out.append(entry)
    return {"samples": N, "seed": seed, "estimates": out}
