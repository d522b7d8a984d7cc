import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uncrit import cases
from uncrit.family import LinearFamily, evaluate
from uncrit.mesh import build_line_grid, delaunay_grid, structured_triangle_grid
from uncrit.patches import arrangement, build_patch_graph, enumerate_patches, is_adjacent, _build
from uncrit.pltopo import Tag, classify_values

GRID = structured_triangle_grid(5, 5)
CENTRE = 12


def generic_family(rng, m, grid=GRID):
    return LinearFamily(rng.standard_normal((m + 1, grid.n)))


def test_generic_six_neighbor_vertex_m2_has_22_patches(rng):
    for _ in range(20):
        fam = generic_family(rng, 2)
        pats = enumerate_patches(fam, GRID, CENTRE)
        assert len(pats) == 22
        assert len({p.sign_vector for p in pats}) == 22


def test_polygon_and_search_agree(rng):
    for _ in range(10):
        fam = generic_family(rng, 2)
        a = {p.sign_vector for p in enumerate_patches(fam, GRID, CENTRE)}
        b = {p.sign_vector for p in enumerate_patches(fam, GRID, CENTRE, method="search")}
        assert a == b


def test_generic_m3_count(rng):
    fam = generic_family(rng, 3)
    assert len(enumerate_patches(fam, GRID, CENTRE)) == 1 + 6 + 15 + 20


def test_sweep_and_search_agree_m1(rng):
    fam = generic_family(rng, 1)
    for v in range(GRID.n):
        a = {p.sign_vector for p in enumerate_patches(fam, GRID, v)}
        b = {p.sign_vector for p in enumerate_patches(fam, GRID, v, method="search")}
        assert a == b


def test_leftmost_m1_patch_is_lower_link_of_minus_g1(rng):
    fam = generic_family(rng, 1)
    for v in range(GRID.n):
        pats = enumerate_patches(fam, GRID, v)
        left = next(p for p in pats if p.interval[0] == -np.inf)
        g1 = fam.g[1]
        expected = tuple(1 if -g1[j] > -g1[v] else -1 for j in GRID.links[v].ring)
        assert left.sign_vector == expected


def test_constant_family_has_one_universal_patch():
    fam = LinearFamily(np.vstack([np.arange(GRID.n, dtype=float), np.zeros(GRID.n)]))
    pats = enumerate_patches(fam, GRID, CENTRE)
    assert len(pats) == 1 and pats[0].interval == (-np.inf, np.inf)


def test_coincident_hyperplanes_are_merged():
    # two neighbors carry identical constraints: 5 distinct planes on a 6-ring
    rng = np.random.default_rng(3)
    g = rng.standard_normal((3, GRID.n))
    ring = GRID.links[CENTRE].ring
    g[:, ring[3]] = g[:, ring[0]]
    arr = arrangement(LinearFamily(g), GRID, CENTRE)
    assert len(arr.b) == 5
    assert len(_build(arr).patches) == 1 + 5 + 10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_witnesses_and_partition_of_unity(seed, m):
    rng = np.random.default_rng(seed)
    fam = generic_family(rng, m)
    v = int(rng.integers(GRID.n))
    arr = _build(arrangement(fam, GRID, v))
    for p in arr.patches:
        assert p.contains(p.witness, strict=True)
        assert arr.signs_at(p.witness) == p.sign_vector
    A = rng.standard_normal((200, m)) * 3
    for a in A:
        p = arr.locate(a)
        assert p is not None and p.contains(a, strict=False)


def test_ties_at_arrangement_vertices_resolve_to_real_cells(rng):
    fam = generic_family(rng, 2)
    arr = _build(arrangement(fam, GRID, CENTRE))
    R, b = arr.R, arr.b
    for p, q in itertools.combinations(range(len(b)), 2):
        a = np.linalg.solve(np.array([R[p], R[q]]), [-b[p], -b[q]])
        # snap onto the planes exactly where floating point allows
        assert arr.locate(a) is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_patch_type_matches_direct_classification(seed, m):
    rng = np.random.default_rng(seed)
    fam = generic_family(rng, m)
    v = int(rng.integers(GRID.n))
    arr = _build(arrangement(fam, GRID, v))
    a = rng.standard_normal(m) * 2
    assert arr.locate(a).ctype == classify_values(GRID.links[v], evaluate(fam, a))


def test_adjacency_symmetry_exhaustive(rng):
    fam = generic_family(rng, 2)
    pats = {v: enumerate_patches(fam, GRID, v) for v in range(GRID.n)}
    for v in range(GRID.n):
        for w in (v,) + GRID.neighbor_lists[v]:
            for p in pats[v]:
                for q in pats[w]:
                    if p is q:
                        continue
                    assert is_adjacent(p, q)[0] == is_adjacent(q, p)[0]


def test_adjacency_rejects_non_neighbors(rng):
    fam = generic_family(rng, 1)
    p = enumerate_patches(fam, GRID, 0)[0]
    q = enumerate_patches(fam, GRID, 24)[0]
    with pytest.raises(ValueError):
        is_adjacent(p, q)


def _interval_oracle(fam, p, q):
    """m = 1 reference: closures meet at the swap parameter of the pair, interiors disjoint."""
    i, j = p.vertex, q.vertex
    c0 = fam.g[0, j] - fam.g[0, i]
    c = fam.g[1, j] - fam.g[1, i]
    if c == 0:
        return False
    r = -c0 / c
    tol = 1e-9 * max(1.0, abs(r))
    inside = lambda iv: iv[0] - tol <= r <= iv[1] + tol  # noqa: E731
    overlap = min(p.interval[1], q.interval[1]) - max(p.interval[0], q.interval[0]) > 1e-9
    opposite = p.sign_vector[GRID.links[i].ring.index(j)] != q.sign_vector[GRID.links[j].ring.index(i)]
    return inside(p.interval) and inside(q.interval) and not (opposite and overlap)


def test_neighbor_adjacency_matches_interval_oracle(rng):
    for _ in range(3):
        fam = generic_family(rng, 1)
        pats = {v: enumerate_patches(fam, GRID, v) for v in range(GRID.n)}
        for i, j in GRID.edges():
            for p in pats[i]:
                for q in pats[j]:
                    assert is_adjacent(p, q)[0] == _interval_oracle(fam, p, q)


def test_graph_edges_flag_type_equality(rng):
    grid = delaunay_grid(rng.uniform(0, 1, (40, 2)))
    fam = LinearFamily(rng.standard_normal((3, grid.n)))
    g = build_patch_graph(fam, grid)
    for e in g.edges:
        assert e.a < e.b
        assert e.same_type == (g.nodes[e.a].ctype.tag is g.nodes[e.b].ctype.tag)
    assert all(not grid.boundary_flags[p.vertex] for p in g.nodes)
    assert all(p.singular for p in g.nodes)


def test_include_boundary_adds_boundary_patches():
    grid, fam = cases.parabola_sine(41)
    a = build_patch_graph(fam, grid)
    b = build_patch_graph(fam, grid, include_boundary=True)
    assert len(b.nodes) > len(a.nodes)
    assert {p.vertex for p in b.nodes} >= {0, grid.n - 1}


def test_soft_cap_warning(rng):
    grid = build_line_grid(np.arange(4.0))
    fam = LinearFamily(rng.standard_normal((6, 4)))
    with pytest.warns(RuntimeWarning, match="exceeds"):
        enumerate_patches(fam, grid, 1)
