"""Tests for spherical buildings, building maps and apartment lifting."""

from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from flathull import spherical as sp


def heawood():
    return sp.projective_plane_building(2)


def k33():
    return sp.complete_bipartite_building(
        [("a", i) for i in range(3)], [("b", i) for i in range(3)]
    )


def test_building_sizes():
    h = heawood()
    # [DERIVED] frozen from exhaustive enumeration: the order-2 projective
    # plane has 7 points, 7 lines, 21 flags
    assert len(h.vertices) == 14
    assert len(h.edges) == 21
    p3 = sp.projective_plane_building(3)
    assert len(p3.vertices) == 26
    assert len(p3.edges) == 52
    k = k33()
    assert len(k.vertices) == 6 and len(k.edges) == 9


def test_oracle_apartment_counts():
    # [DERIVED] frozen from exhaustive cycle enumeration
    assert len(sp.sph_oracle_apartments(heawood())) == 28
    assert len(sp.sph_oracle_apartments(k33())) == 9
    pts = sp.points_building(range(5))
    assert len(sp.sph_oracle_apartments(pts)) == 10


def test_polygon_validation_rejects_bad_graphs():
    with pytest.raises(sp.SphericalInputError):
        sp.polygon_building(2, [(0, 1)])  # degree 1
    with pytest.raises(sp.SphericalInputError):
        # odd cycle: not bipartite
        sp.polygon_building(2, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 1), (2, 3)])
    with pytest.raises(sp.SphericalInputError):
        # 4-cycle has diameter 2 but girth 4 != 6
        sp.polygon_building(3, [(0, 1), (1, 2), (2, 3), (3, 0)])


def test_distances_exact():
    h = heawood()
    a, b = h.edges[0]
    assert sp.sph_distance(h, sp.vp(a), sp.vp(b)) == Q(1, 3)
    mid = sp.ep(a, b, Q(1, 2))
    assert sp.sph_distance(h, sp.vp(a), mid) == Q(1, 6)
    assert sp.sph_distance(h, mid, mid) == 0
    # diameter is pi
    dist = sp.graph_distances(h)
    far = next(v for v in h.vertices if dist[a][v] == 3)
    assert sp.sph_distance(h, sp.vp(a), sp.vp(far)) == 1


def test_distance_symmetry_and_triangle():
    h = k33()
    pts = [sp.vp(v) for v in h.vertices] + [
        sp.ep(a, b, Q(1, 3)) for a, b in h.edges[:4]
    ]
    for p in pts:
        for q in pts:
            d = sp.sph_distance(h, p, q)
            assert d == sp.sph_distance(h, q, p)
            for r in pts:
                assert d <= sp.sph_distance(h, p, r) + sp.sph_distance(h, r, q)


def test_geodesic_uniqueness_below_pi():
    h = heawood()
    dist = sp.graph_distances(h)
    for a in h.vertices:
        for b in h.vertices:
            if 0 < dist[a][b] < 3:
                g = sp.the_geodesic(h, sp.vp(a), sp.vp(b))
                assert sp.path_length(h, g) == Q(dist[a][b], 3)
                assert g[0].vertex == a and g[-1].vertex == b


def test_point_along_walks_exactly():
    h = heawood()
    dist = sp.graph_distances(h)
    a = h.vertices[0]
    b = next(v for v in h.vertices if dist[a][v] == 2)
    g = sp.the_geodesic(h, sp.vp(a), sp.vp(b))
    mid = sp.point_along(h, g, Q(1, 3))
    assert mid.is_vertex()
    assert sp.sph_distance(h, sp.vp(a), mid) == Q(1, 3)
    q = sp.point_along(h, g, Q(1, 2))
    assert sp.sph_distance(h, sp.vp(a), q) == Q(1, 2)


def test_convex_set_checker():
    h = heawood()
    adj = sp.adjacency(h)
    dist = sp.graph_distances(h)
    a = h.vertices[0]
    b = adj[a][0]
    c = next(w for w in adj[b] if dist[a][w] == 2)
    # geodesic path: fine
    sp.make_convex_set(h, [a, b, c], [(a, b), (b, c)])
    # a 3-star cannot embed in a circle
    star = list(adj[a][:3])
    with pytest.raises(sp.SphericalInputError):
        sp.make_convex_set(h, [a] + star, [(a, w) for w in star])
    # two nearby isolated vertices are not convex
    with pytest.raises(sp.SphericalInputError):
        sp.make_convex_set(h, [a, c])
    # two antipodal vertices are
    far = next(v for v in h.vertices if dist[a][v] == 3)
    sp.make_convex_set(h, [a, far])
    # a path of more than m edges is not convex
    d = next(w for w in adj[c] if dist[a][w] == 3)
    e = next(w for w in adj[d] if dist[b][w] == 3 and w != c)
    with pytest.raises(sp.SphericalInputError):
        sp.make_convex_set(h, [a, b, c, d, e], [(a, b), (b, c), (c, d), (d, e)])


def test_apartment_canonical_form():
    h = k33()
    ap = sp.sph_oracle_apartments(h)[0]
    rotated = ap.cycle[2:] + ap.cycle[:2]
    assert sp.make_apartment(h, rotated) == ap
    assert sp.make_apartment(h, tuple(reversed(ap.cycle))) == ap


def test_suspension_log_map_is_valid():
    h = heawood()
    x = h.vertices[0]
    f = sp.suspension_log_map(h, x)
    assert f.target.m == 2
    assert len(f.target.vertices) == 2 + 3  # two poles + three directions
    assert sp.validate_building_map(f) is None
    # the base maps to a pole, its neighbors to mid-arc points
    vm = f.mapping()
    assert vm[x] == sp.vp(("pole", 0))
    for u in sp.adjacency(h)[x]:
        img = vm[u]
        assert not img.is_vertex()
        assert sp.sph_distance(f.target, sp.vp(("pole", 0)), img) == Q(1, 3)


def test_chamber_isometry_report_flags_collapse():
    h = k33()
    # collapse everything to one vertex: edges are crushed, not isometric
    a = h.vertices[0]
    vm = {v: sp.vp(a) for v in h.vertices}
    f = sp.BuildingMap(h, h, tuple(sorted(vm.items())))
    rep = sp.check_chamber_isometry(f)
    assert not rep.passed and rep.violations


def test_differential_of_identity():
    h = heawood()
    ident = sp.building_map(h, h, {v: sp.vp(v) for v in h.vertices})
    x = h.vertices[0]
    d = sp.differential(ident, sp.vp(x))
    assert d.source.vertices == d.target.vertices
    assert all(img == sp.vp(v) for v, img in d.vertex_map)


def test_lift_covers_all_short_paths():
    h = heawood()
    adj = sp.adjacency(h)
    oracle = {a.cycle for a in sp.sph_oracle_apartments(h)}
    for a, b in h.edges:
        for c in adj[b]:
            if c == a:
                continue
            cset = sp.make_convex_set(h, [a, b, c], [(a, b), (b, c)])
            ap = sp.sph_apartment_containing(h, cset)
            assert ap.cycle in oracle
            assert {a, b, c} <= set(ap.cycle)
            assert set(cset.edges) <= set(ap.edge_set())


def test_lift_with_prescribed_link_apartment():
    h = heawood()
    adj = sp.adjacency(h)
    dist = sp.graph_distances(h)
    a = h.vertices[0]
    b = adj[a][0]
    c = next(w for w in adj[b] if dist[a][w] == 2)
    cset = sp.make_convex_set(h, [a, b, c], [(a, b), (b, c)])
    other = next(w for w in adj[b] if w not in (a, c))
    ap = sp.sph_apartment_containing(h, cset, prescribed=(sp.vp(b), (a, c)))
    assert sp.apartment_directions_at(ap, sp.vp(b)) == tuple(sorted((a, c)))
    with pytest.raises(sp.SphericalInputError):
        # prescribed pair must contain the directions of C at the base
        sp.sph_apartment_containing(h, cset, prescribed=(sp.vp(b), (a, other)))


def test_lift_empty_singleton_and_antipodes():
    h = heawood()
    dist = sp.graph_distances(h)
    ap = sp.sph_apartment_containing(h, sp.make_convex_set(h))
    assert len(ap.cycle) == 6
    v = h.vertices[3]
    ap1 = sp.sph_apartment_containing(h, sp.make_convex_set(h, [v]))
    assert v in ap1.cycle
    far = next(w for w in h.vertices if dist[v][w] == 3)
    ap2 = sp.sph_apartment_containing(h, sp.make_convex_set(h, [v, far]))
    assert {v, far} <= set(ap2.cycle)


def test_lift_fixes_full_apartments():
    for b in (heawood(), k33()):
        for ap in sp.sph_oracle_apartments(b)[:6]:
            cset = sp.make_convex_set(b, ap.cycle, ap.edge_set())
            assert sp.sph_apartment_containing(b, cset) == ap


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_seeded_lifts_are_valid_apartments(seed):
    h = heawood()
    adj = sp.adjacency(h)
    a, b = h.edges[0]
    c = adj[b][-1] if adj[b][-1] != a else adj[b][0]
    cset = sp.make_convex_set(h, [a, b, c], [(a, b), (b, c)])
    ap = sp.sph_apartment_containing(h, cset, seed=seed)
    assert {a, b, c} <= set(ap.cycle)
    # same seed twice: identical result
    assert sp.sph_apartment_containing(h, cset, seed=seed) == ap


def test_dim0_lift():
    pts = sp.points_building(range(6))
    f = sp.building_map(pts, sp.points_building(range(2)),
                        {i: sp.vp(i % 2) for i in range(6)})
    c1 = sp.make_convex_set(pts, [3])
    a2 = sp.make_apartment(f.target, (0, 1))
    a1 = sp.lift_apartment(f, c1, a2)
    assert 3 in a1.cycle and len(a1.cycle) == 2
    imgs = {f.mapping()[v].vertex for v in a1.cycle}
    assert imgs == {0, 1}
