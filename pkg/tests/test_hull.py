"""Apartment-containment solvers and their certificates."""

import pytest

from fractions import Fraction as Q

from flathull import coxeter as cx
from flathull import flats as fl
from flathull import hull as hl
from flathull import models as md
from flathull import spherical as sp

H = cx.Halfspace
IDENT = [[(1,), (), ()], [(), (1,), ()], [(), (), (1,)]]

TREE = md.TreeModel(q=2, radius=6)
LATTICE = md.LatticeModel(q=2, radius=4)


def frame_chart(model=LATTICE):
    return md.frame_apartment(model, IDENT)


def assert_verified(model, cert):
    rep = hl.verify_certificate(model, cert)
    assert rep.passed, rep.reason
    return rep


# --- cone case ---------------------------------------------------------


def test_tree_ray_cone():
    line = md.tree_line(TREE, (0, 0, 0), (1, 1, 1))
    ray = fl.flat_polyhedron(line, [H((1,), Q(0))])
    link = md.link_at(TREE, md.base_vertex(TREE))
    a_x = sp.make_apartment(link.building, ((1,), (2,)))
    cert = hl.cone_apartment(TREE, ray, a_x)
    assert_verified(TREE, cert)
    assert cert.tangent == (md.base_vertex(TREE), ((1,), (2,)))
    # the ray's own direction must appear in the answer
    assert md.Vertex("tree", (1,)) in set(cert.apartment.image())


def test_tree_cone_rejects_wrong_link_apartment():
    line = md.tree_line(TREE, (0, 0, 0), (1, 1, 1))
    ray = fl.flat_polyhedron(line, [H((1,), Q(0))])
    link = md.link_at(TREE, md.base_vertex(TREE))
    bad = sp.make_apartment(link.building, ((0,), (2,)))  # misses direction (1,)
    with pytest.raises((hl.HullError, sp.SphericalInputError)):
        hl.cone_apartment(TREE, ray, bad)


def test_lattice_sector_identity_case():
    ap = frame_chart()
    sector = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0))])
    base = ap.vertex((0, 0))
    hex_here = hl.link_apartment_at(LATTICE, ap, base)
    cert = hl.cone_apartment(LATTICE, sector, hex_here, tip=base)
    assert_verified(LATTICE, cert)
    assert set(fl.realize(LATTICE, sector)) <= set(cert.apartment.image())
    got = hl.link_apartment_at(LATTICE, cert.apartment, base)
    assert sp.canonical_cycle(got.cycle) == sp.canonical_cycle(hex_here.cycle)


def test_lattice_half_plane_cone_against_oracle():
    small = md.LatticeModel(q=2, radius=2)
    ap = frame_chart(small)
    base = ap.vertex((0, 0))
    half = fl.flat_polyhedron(ap, [H((1, 0), Q(0))])
    link = md.link_at(small, base)
    _l, _g, cset = hl._direction_data(small, half, base)
    a_x = sp.sph_apartment_containing(link.building, cset)
    cert = hl.cone_apartment(small, half, a_x, tip=base)
    assert_verified(small, cert)
    # [DERIVED] oracle: the certificate apartment is among all maximal
    # in-ball apartments through the base chamber of the answer
    realized = dict(cert.apartment.mapping)
    chamber = tuple(sorted(
        realized[z] for z in [(0, 0), (1, 0), (1, 1)]))
    seed = md.seed_from_chamber(small, chamber)
    oracle = md.grow_maximal(small, seed, enumerate_all=True)
    assert frozenset(cert.apartment.image()) in {
        frozenset(a.image()) for a in oracle}


# --- Step 1 -------------------------------------------------------------


def test_single_vertex_polyhedron():
    ap = frame_chart()
    pt = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 0), Q(0)),
                                 H((0, 1), Q(0)), H((0, -1), Q(0))])
    cert = hl.apartment_containing_polyhedron(LATTICE, pt)
    assert_verified(LATTICE, cert)
    assert cert.required == (ap.vertex((0, 0)),)


def test_tree_segments_in_lines():
    for left, right in (((0, 0), (1, 1)), ((2, 0, 1), (0, 1, 0))):
        line = md.tree_line(TREE, left, right)
        seg = fl.flat_polyhedron(line, [H((1,), Q(-2)), H((-1,), Q(-2))])
        cert = hl.apartment_containing_polyhedron(TREE, seg)
        assert_verified(TREE, cert)
        assert set(fl.realize(TREE, seg)) <= set(cert.apartment.image())
        # a maximal line in the radius-6 ball has 13 vertices
        assert len(cert.apartment.mapping) == 13


def test_lattice_triangle_step1():
    ap = frame_chart()
    tri = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0)),
                                  H((0, -1), Q(-2))])
    cert = hl.apartment_containing_polyhedron(LATTICE, tri)
    assert_verified(LATTICE, cert)
    assert len(cert.required) == 6
    assert set(cert.required) <= set(cert.apartment.image())


def test_lattice_strip_step1():
    ap = frame_chart()
    strip = fl.flat_polyhedron(ap, [H((0, 1), Q(0)), H((0, -1), Q(-1))])
    cert = hl.apartment_containing_polyhedron(LATTICE, strip)
    assert_verified(LATTICE, cert)


def test_step1_deterministic():
    ap = frame_chart()
    tri = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0)),
                                  H((0, -1), Q(-2))])
    c1 = hl.apartment_containing_polyhedron(LATTICE, tri)
    c2 = hl.apartment_containing_polyhedron(LATTICE, tri)
    assert c1 == c2


# --- Step 3 (prescribed tangent) ----------------------------------------


def test_point_with_every_link_hexagon():
    small = md.LatticeModel(q=2, radius=2)
    ap = frame_chart(small)
    base = ap.vertex((0, 0))
    pt = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 0), Q(0)),
                                 H((0, 1), Q(0)), H((0, -1), Q(0))])
    link = md.link_at(small, base)
    hexes = sorted(sp.sph_oracle_apartments(link.building),
                   key=lambda a: a.cycle)
    assert len(hexes) == 28
    for a_x in hexes[:6]:
        cert = hl.apartment_with_tangent(small, pt, base, a_x)
        assert_verified(small, cert)
        got = hl.link_apartment_at(small, cert.apartment, base)
        assert sp.canonical_cycle(got.cycle) == sp.canonical_cycle(a_x.cycle)


def test_segment_with_all_valid_tangents():
    ap = frame_chart()
    base = ap.vertex((0, 1))
    seg = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 0), Q(0)),
                                  H((0, 1), Q(0)), H((0, -1), Q(-2))])
    link = md.link_at(LATTICE, base)
    _l, _g, cset = hl._direction_data(LATTICE, seg, base)
    good = []
    for a in sp.sph_oracle_apartments(link.building):
        try:
            hl._check_directions_in_apartment(a, cset)
            good.append(a)
        except hl.HullError:
            pass
    # two antipodal link points lie on exactly 3 of the 28 hexagons:
    # 28 hexagons x 3 antipodal pairs each / 28 antipodal pairs total
    assert len(good) == 3
    for a_x in good:
        cert = hl.apartment_with_tangent(LATTICE, seg, base, a_x)
        assert_verified(LATTICE, cert)
        got = hl.link_apartment_at(LATTICE, cert.apartment, base)
        assert sp.canonical_cycle(got.cycle) == sp.canonical_cycle(a_x.cycle)


def test_tangent_outside_apartment_rejected():
    ap = frame_chart()
    base = ap.vertex((0, 1))
    seg = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 0), Q(0)),
                                  H((0, 1), Q(0)), H((0, -1), Q(-2))])
    link = md.link_at(LATTICE, base)
    _l, _g, cset = hl._direction_data(LATTICE, seg, base)
    bad = None
    for a in sp.sph_oracle_apartments(link.building):
        try:
            hl._check_directions_in_apartment(a, cset)
        except hl.HullError:
            bad = a
            break
    with pytest.raises(hl.HullError):
        hl.apartment_with_tangent(LATTICE, seg, base, bad)


# --- Step 2 (chains) ----------------------------------------------------


def test_chain_of_one_matches_step1():
    ap = frame_chart()
    tri = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0)),
                                  H((0, -1), Q(-2))])
    c1 = hl.apartment_containing_chain(LATTICE, [tri])
    assert_verified(LATTICE, c1)
    assert set(fl.realize(LATTICE, tri)) <= set(c1.apartment.image())


def test_tree_nested_segments_chain():
    line = md.tree_line(TREE, (0, 0, 0), (1, 1, 1))
    segs = [fl.flat_polyhedron(line, [H((1,), Q(-i)), H((-1,), Q(-i))])
            for i in (0, 1, 2)]
    cert = hl.apartment_containing_chain(TREE, segs)
    assert_verified(TREE, cert)
    assert set(fl.realize(TREE, segs[-1])) <= set(cert.apartment.image())


def test_lattice_triangle_chain():
    ap = frame_chart()
    tris = [fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0)),
                                    H((0, -1), Q(-i))]) for i in (1, 2, 3)]
    cert = hl.apartment_containing_chain(LATTICE, tris)
    assert_verified(LATTICE, cert)
    for t in tris:
        assert set(fl.realize(LATTICE, t)) <= set(cert.apartment.image())


def test_non_increasing_chain_rejected():
    ap = frame_chart()
    t2 = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0)),
                                 H((0, -1), Q(-2))])
    t1 = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0)),
                                 H((0, -1), Q(-1))])
    with pytest.raises(hl.HullError):
        hl.apartment_containing_chain(LATTICE, [t2, t1])


# --- intersections ------------------------------------------------------


def test_intersect_equal_apartments():
    ap = frame_chart()
    inter = hl.intersect_apartments(ap, ap)
    assert inter.halfspaces == ()
    assert set(fl.realize(LATTICE, inter)) == set(ap.image())


def test_intersect_tree_lines_in_segment():
    l1 = md.tree_line(TREE, (0, 0, 0), (1, 1, 1))
    l2 = md.tree_line(TREE, (0, 0, 0), (1, 1, 0))
    inter = hl.intersect_apartments(l1, l2)
    # shared: the path from (0,0,0) up through the base to (1,1)
    assert len(inter.halfspaces) <= 2
    got = set(fl.realize(TREE, inter))
    assert got == set(l1.image()) & set(l2.image())


def test_intersect_frames_sharing_two_lines():
    ap = frame_chart()
    basis2 = [[(1,), (), (1,)], [(), (1,), ()], [(), (), (1,)]]
    ap2 = md.frame_apartment(LATTICE, basis2)
    inter = hl.intersect_apartments(ap, ap2)
    roots = cx.root_direction_set("A2").covectors
    assert all(h.normal in roots for h in inter.halfspaces)
    assert 1 <= len(inter.halfspaces) <= 6
    assert set(fl.realize(LATTICE, inter)) == \
        set(ap.image_set()) & set(ap2.image_set())


def test_intersect_disjoint_apartments_returns_none():
    small = md.TreeModel(q=2, radius=4)
    l1 = md.tree_line(small, (0, 0), (1, 1))
    # a line inside the (2,) subtree, avoiding the root entirely
    far = md.eucl_apartment(small, {
        (0,): md.Vertex("tree", (2,)),
        (1,): md.Vertex("tree", (2, 0)),
        (2,): md.Vertex("tree", (2, 0, 0)),
        (-1,): md.Vertex("tree", (2, 1)),
        (-2,): md.Vertex("tree", (2, 1, 1)),
    })
    assert not (set(l1.image()) & set(far.image()))
    assert hl.intersect_apartments(l1, far) is None


# --- parallel sets ------------------------------------------------------


def test_parallel_set_of_full_tree_line():
    long_line = md.tree_line(TREE, (0,) * 6, (1,) * 6)
    flat = fl.flat_polyhedron(long_line, [])
    ps = hl.parallel_set_ball(TREE, flat, 6)
    assert set(ps) == set(long_line.image())


def test_parallel_set_of_whole_apartment():
    small = md.LatticeModel(q=2, radius=3)
    ap = frame_chart(small)
    flat = fl.flat_polyhedron(ap, [])
    ps = hl.parallel_set_ball(small, flat, 3)
    assert set(ps) == set(ap.image())


def test_parallel_set_of_wall():
    small = md.LatticeModel(q=2, radius=3)
    ap = frame_chart(small)
    wall = fl.flat_polyhedron(ap, [H((0, 1), Q(0)), H((0, -1), Q(0))])
    ps = hl.parallel_set_ball(small, wall, 3)
    # strictly bigger than one apartment: several apartments share the wall
    assert set(ap.image()) < set(ps)


# --- certificates -------------------------------------------------------


def test_certificate_detects_tampering():
    ap = frame_chart()
    tri = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 1), Q(0)),
                                  H((0, -1), Q(-2))])
    cert = hl.apartment_containing_polyhedron(LATTICE, tri)
    # swap two apartment vertices: containment/flatness must break
    items = list(cert.apartment.mapping)
    (z1, v1), (z2, v2) = items[0], items[1]
    items[0], items[1] = (z1, v2), (z2, v1)
    bad_ap = md.EuclApartment(LATTICE, tuple(sorted(items)))
    bad = hl.ApartmentCertificate(bad_ap, cert.required, cert.containment,
                                  cert.flatness, cert.tangent)
    rep = hl.verify_certificate(LATTICE, bad)
    assert not rep.passed


def test_certificate_detects_wrong_distance_record():
    ap = frame_chart()
    seg = fl.flat_polyhedron(ap, [H((1, 0), Q(0)), H((-1, 0), Q(0)),
                                  H((0, 1), Q(0)), H((0, -1), Q(-2))])
    cert = hl.apartment_containing_polyhedron(LATTICE, seg)
    (pair, want), rest = cert.flatness[0], cert.flatness[1:]
    bad = hl.ApartmentCertificate(cert.apartment, cert.required,
                                  cert.containment,
                                  ((pair, want + 1),) + rest, cert.tangent)
    rep = hl.verify_certificate(LATTICE, bad)
    assert not rep.passed
