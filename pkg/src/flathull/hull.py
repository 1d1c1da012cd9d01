"""Apartments containing flat convex sets, with machine-checkable certificates.

The solvers realize the constructive arguments behind the main containment
theorem at desk scale: the cone case seeds an apartment germ from a link
apartment and grows it outward; the general case runs an induction on
(dimension, facet count), extending the polyhedron beyond a facet inside an
inductively-found apartment and gluing the two halves.  Every solver returns
an ApartmentCertificate whose evidence re-verifies independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import coxeter as cx
from . import flats as fl
from . import models as md
from . import spherical as sp

Q = Fraction


class HullError(RuntimeError):
    """A solver precondition failed or the search could not finish."""


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class ApartmentCertificate:
    """Self-contained evidence that an apartment contains a vertex set.

    `containment` places every required vertex at its chart point in the
    apartment; `flatness` records the exact squared distance of every pair
    of required vertices; `tangent` optionally pins the apartment's link
    apartment at a vertex (canonical cycle form).
    """

    apartment: md.EuclApartment
    required: tuple        # sorted model vertices that must be contained
    containment: tuple     # sorted (vertex, chart point) pairs
    flatness: tuple        # sorted ((v1, v2), squared distance) pairs
    tangent: Optional[tuple] = None  # (vertex, canonical link cycle)


@dataclass(frozen=True)
class CertificateReport:
    passed: bool
    reason: str
    pairs_checked: int


def link_apartment_at(model, apartment: md.EuclApartment, x: md.Vertex):
    """The link apartment induced at x by an apartment containing its star."""
    z0 = apartment.position(x)
    realized = dict(apartment.mapping)
    link = md.link_at(model, x)
    if isinstance(model, md.TreeModel):
        labels = []
        for d in ((1,), (-1,)):
            w = tuple(a + b for a, b in zip(z0, d))
            if w not in realized:
                raise HullError("apartment does not contain the star of x")
            labels.append(realized[w].address)
        return sp.make_apartment(link.building, labels)
    cycle = []
    for d in cx.HEX_DIRECTIONS:
        w = tuple(a + b for a, b in zip(z0, d))
        if w not in realized:
            raise HullError("apartment does not contain the star of x")
        cycle.append(realized[w].address)
    return sp.make_apartment(link.building, cycle)


def _certificate(model, apartment, required, tangent=None) -> ApartmentCertificate:
    req = tuple(sorted(set(required)))
    image = dict(apartment.mapping)
    positions = {v: z for z, v in image.items()}
    missing = [v for v in req if v not in positions]
    if missing:
        raise HullError(f"apartment misses required vertices: {missing[:3]}")
    containment = tuple(sorted((v, positions[v]) for v in req))
    flatness = tuple(sorted(
        ((v1, v2), md.metric_sq(model, v1, v2))
        for v1, v2 in itertools.combinations(req, 2)))
    if tangent is not None:
        x, a_x = tangent
        if isinstance(model, md.TreeModel):
            tangent = (x, tuple(sorted(a_x.cycle)))
        else:
            tangent = (x, sp.canonical_cycle(a_x.cycle))
    return ApartmentCertificate(apartment, req, containment, flatness, tangent)


def verify_certificate(model, cert: ApartmentCertificate) -> CertificateReport:
    """Re-check a certificate from scratch, without trusting the solver."""
    mapping = dict(cert.apartment.mapping)
    try:
        md.eucl_apartment(model, mapping)
    except md.ModelInputError as exc:
        return CertificateReport(False, f"apartment: {exc}", 0)
    placed = {}
    for v, z in cert.containment:
        if mapping.get(z) != v:
            return CertificateReport(False, f"vertex {v} not at chart point {z}", 0)
        placed[v] = z
    for v in cert.required:
        if v not in placed:
            return CertificateReport(False, f"required vertex {v} unplaced", 0)
    ch = md._chart(model)
    pairs = 0
    for (v1, v2), want in cert.flatness:
        pairs += 1
        if md.metric_sq(model, v1, v2) != want:
            return CertificateReport(False, f"distance record wrong for {v1}, {v2}", pairs)
        if v1 in placed and v2 in placed:
            if ch.sq_dist(placed[v1], placed[v2]) != want:
                return CertificateReport(False, f"chart distance wrong for {v1}, {v2}", pairs)
    if cert.tangent is not None:
        x, cyc = cert.tangent
        try:
            got = link_apartment_at(model, cert.apartment, x)
        except (HullError, md.ModelInputError) as exc:
            return CertificateReport(False, f"tangent: {exc}", pairs)
        if isinstance(model, md.TreeModel):
            have = tuple(sorted(got.cycle))
        else:
            have = sp.canonical_cycle(got.cycle)
        if have != tuple(cyc):
            return CertificateReport(False, "tangent link apartment differs", pairs)
    return CertificateReport(True, "", pairs)


# ---------------------------------------------------------------------------
# tangent data of a polyhedron at a vertex


def _direction_data(model, poly: fl.FlatPolyhedron, x: md.Vertex):
    """(link, log entries, convex direction set) of a polyhedron at x."""
    pts = fl.realize(model, poly)
    if x not in pts:
        raise HullError("base point does not lie in the polyhedron")
    log = md.log_at(model, x, pts, chart=poly.apartment)
    link = log.link
    verts, edges = fl.tangent_subcomplex(model, poly, x)
    if not verts:
        return link, log, None
    cset = sp.make_convex_set(link.building, verts, edges)
    return link, log, cset


def _check_directions_in_apartment(a_x: sp.SphApartment, cset) -> None:
    if cset is None:
        return
    for v in cset.vertices:
        if v not in a_x.cycle:
            raise HullError(f"tangent direction {v!r} outside the link apartment")
    cyc = a_x.cycle
    n = len(cyc)
    cycle_edges = {tuple(sorted((cyc[i], cyc[(i + 1) % n]))) for i in range(n)}
    for e in cset.edges:
        if e not in cycle_edges:
            raise HullError(f"tangent edge {e!r} outside the link apartment")


def cone_tip(model, poly: fl.FlatPolyhedron) -> md.Vertex:
    """Deterministic tip choice: least realized vertex where every
    halfspace is tight."""
    tight = []
    for v in fl.realize(model, poly):
        z = poly.apartment.position(v)
        if all(sum(a * b for a, b in zip(h.normal, z)) == h.offset
               for h in poly.halfspaces):
            tight.append(v)
    if not tight:
        raise HullError("polyhedron is not a cone at any realized vertex")
    # prefer tips away from the truncation boundary so the germ fits
    base = md.base_vertex(model)
    tight.sort(key=lambda v: (md.comb_dist(model, base, v), v))
    for v in tight:
        if _star_available(model, poly, v):
            return v
    return tight[0]


def _star_available(model, poly, x) -> bool:
    """Whether every tangent direction of poly at x has a realized neighbor."""
    try:
        fl.tangent_subcomplex(model, poly, x)
        return True
    except md.TruncationError:
        return False


# ---------------------------------------------------------------------------
# cone case: germ extension of a link apartment


def _alignments(model, a_x: sp.SphApartment):
    """Candidate placements of the link apartment onto chart directions."""
    if isinstance(model, md.TreeModel):
        p0, p1 = a_x.cycle
        return [{p0: (1,), p1: (-1,)}, {p1: (1,), p0: (-1,)}]
    cyc = list(a_x.cycle)
    out = []
    for order in (cyc, list(reversed(cyc))):
        for r in range(6):
            rot = order[r:] + order[:r]
            out.append({lbl: cx.HEX_DIRECTIONS[i] for i, lbl in enumerate(rot)})
    return out


def cone_apartment(model, poly: fl.FlatPolyhedron, a_x: sp.SphApartment,
                   tip: Optional[md.Vertex] = None) -> ApartmentCertificate:
    """Apartment containing a cone, with prescribed link apartment at the tip.

    The tangent directions of the cone are lifted into the link apartment
    (the lift is through the identity direction map, which is what remains
    of the boundary argument at truncation scale); the link apartment then
    seeds a germ around the tip that is grown outward to a maximal in-ball
    apartment containing the cone.
    """
    if tip is None:
        tip = cone_tip(model, poly)
    pts = fl.realize(model, poly)
    link, log, cset = _direction_data(model, poly, tip)
    if a_x.building != link.building:
        raise HullError("link apartment lives in the wrong link")
    if cset is not None:
        ident = sp.building_map(link.building, link.building,
                                {v: sp.vp(v) for v in link.building.vertices})
        lifted = sp.lift_apartment(ident, cset, a_x)
        _check_directions_in_apartment(lifted, cset)
    coords = {v: (cell, co) for (v, cell, co, _r) in log.entries}
    for align in _alignments(model, a_x):
        seed = {(0,) * md._chart(model).dimension: tip}
        ok = True
        for lbl, d in align.items():
            seed[d] = md.Vertex(tip.kind, lbl)
        for v in pts:
            cell, co = coords[v]
            if cell is None:
                continue
            kind, label = cell
            if isinstance(model, md.TreeModel):
                z = (int(co[0]) * align[label][0],)
            elif kind == "vertex":
                d = align[label]
                z = (int(co[0]) * d[0], int(co[0]) * d[1])
            else:
                d1, d2 = align[label[0]], align[label[1]]
                al, be = int(co[0]), int(co[1])
                z = (al * d1[0] + be * d2[0], al * d1[1] + be * d2[1])
            if seed.get(z, v) != v:
                ok = False
                break
            seed[z] = v
        if not ok:
            continue
        if any(not md.in_ball(model, v) for v in seed.values()):
            raise md.TruncationError(
                "prescribed germ does not fit inside the truncation ball")
        try:
            md.eucl_apartment(model, seed)
        except md.ModelInputError:
            continue
        grown = md.grow_maximal(model, seed)
        if grown:
            return _certificate(model, grown[0], pts, tangent=(tip, a_x))
    raise HullError("no apartment extends the prescribed germ around the cone")


# ---------------------------------------------------------------------------
# Step 1: induction on (dimension, facet count)


def _link_apartment_containing(model, poly, x):
    """A deterministic link apartment containing the tangent of poly at x."""
    link, _log, cset = _direction_data(model, poly, x)
    if cset is None:
        if isinstance(model, md.TreeModel):
            vs = sorted(link.building.vertices)
            return sp.make_apartment(link.building, vs[:2])
        return sorted(sp.sph_oracle_apartments(link.building),
                      key=lambda a: a.cycle)[0]
    return sp.sph_apartment_containing(link.building, cset)


def _facet_base_point(model, poly, facet) -> md.Vertex:
    """Least realized relative-interior vertex of a facet (least vertex as
    fallback when the clipped facet has no interior vertex)."""
    pts = fl.realize(model, facet.polyhedron)
    others = [h for h in poly.halfspaces if h != facet.halfspace]
    interior = []
    for v in pts:
        z = facet.polyhedron.apartment.position(v)
        if all(sum(a * b for a, b in zip(h.normal, z)) > h.offset for h in others):
            interior.append(v)
    base = md.base_vertex(model)
    cands = sorted(interior or pts,
                   key=lambda v: (md.comb_dist(model, base, v), v))
    for v in cands:
        if _star_available(model, poly, v) and \
                _star_available(model, facet.polyhedron, v):
            return v
    return cands[0]


def _star_deltas(model, apartment, x):
    """(chart point of x, {link label: unit chart delta}) in an apartment."""
    z0 = apartment.position(x)
    realized = dict(apartment.mapping)
    deltas = ((1,), (-1,)) if isinstance(model, md.TreeModel) else cx.HEX_DIRECTIONS
    out = {}
    for d in deltas:
        w = tuple(a + b for a, b in zip(z0, d))
        if w in realized:
            out[realized[w].address] = d
    return z0, out


def _mat_inverse(mat):
    if len(mat) == 1:
        return ((mat[0][0],),)  # entries are +-1
    (a, b), (c, d) = mat
    det = a * d - b * c  # +-1 for chart isometries
    return ((d // det, -b // det), (-c // det, a // det))


class _ChartTransport:
    """Chart isometry between two apartments agreeing on their shared star
    directions at a common vertex; transports points and halfspaces."""

    def __init__(self, model, src: md.EuclApartment, dst: md.EuclApartment,
                 x: md.Vertex):
        z_s, ds = _star_deltas(model, src, x)
        z_d, dd = _star_deltas(model, dst, x)
        shared = sorted(set(ds) & set(dd))
        if not shared:
            raise HullError("charts share no direction at the base point")
        dim = md._chart(model).dimension
        zero = (0,) * dim
        for mat in cx.point_isometries(dim):
            if all(cx.apply_isometry(mat, zero, ds[l]) == dd[l] for l in shared):
                self.mat = mat
                self.inv = _mat_inverse(mat)
                self.z_s, self.z_d = z_s, z_d
                self.zero = zero
                return
        raise HullError("no chart isometry matches the shared directions")

    def point(self, z):
        rel = tuple(a - b for a, b in zip(z, self.z_s))
        return tuple(a + b for a, b in
                     zip(cx.apply_isometry(self.mat, self.zero, rel), self.z_d))

    def halfspace(self, h: cx.Halfspace) -> cx.Halfspace:
        # n'(z') = n(z) for z' = point(z): n' = n o M^{-1}, shifted offsets
        n = h.normal
        np = tuple(sum(n[i] * self.inv[i][j] for i in range(len(n)))
                   for j in range(len(n)))
        off = h.offset - sum(a * b for a, b in zip(n, self.z_s)) \
            + sum(a * b for a, b in zip(np, self.z_d))
        return cx.Halfspace(np, off)


def _transport_constraints(transport, poly: fl.FlatPolyhedron):
    out = [transport.halfspace(h) for h in poly.halfspaces]
    for n, val in poly.pins:
        out.append(transport.halfspace(cx.Halfspace(n, val)))
        out.append(transport.halfspace(cx.Halfspace(tuple(-c for c in n), -val)))
    return out


def apartment_containing_polyhedron(model, poly: fl.FlatPolyhedron) -> ApartmentCertificate:
    """An apartment containing a realized Weyl polyhedron.

    Induction on the facet count: a polyhedron without facets is a cone and
    goes through the cone case; otherwise a facet is chosen, an apartment
    around the facet with prescribed tangent is found inductively, the
    polyhedron is extended beyond the facet inside that apartment, the two
    halves are glued, and the extension (one facet fewer) is solved.
    """
    facet_list = fl.facets(poly)
    if not facet_list:
        tip = cone_tip(model, poly)
        a_x = _link_apartment_containing(model, poly, tip)
        return cone_apartment(model, poly, a_x, tip=tip)
    facet = facet_list[0]
    x = _facet_base_point(model, poly, facet)
    a_x = _link_apartment_containing(model, poly, x)
    sub = apartment_with_tangent(model, facet.polyhedron, x, a_x)
    big = sub.apartment
    # transport the polyhedron into the inductively-found apartment, drop
    # the facet wall there and take the complementary half of the extension
    move = _ChartTransport(model, poly.apartment, big, x)
    wall = fl._primitive_halfspace(move.halfspace(facet.halfspace))
    ext_hs = [h for h in _transport_constraints(move, poly)
              if fl._primitive_halfspace(h) != wall]
    complement = fl.flat_polyhedron(
        big, ext_hs + [cx.Halfspace(tuple(-c for c in wall.normal), -wall.offset)])
    glued = fl.glue(model, poly, complement, x)
    # re-express the ideal extension constraints in the merged chart; the
    # merged chart is too small to witness the dropped wall, so the glued
    # hull cannot be used directly without picking up clipping facets
    back = _ChartTransport(model, big, glued.apartment, x)
    ideal = fl.flat_polyhedron(glued.apartment, [back.halfspace(h) for h in ext_hs])
    if len(fl.facets(ideal)) >= len(facet_list):
        raise HullError("extension did not strictly reduce the facet count")
    cert = apartment_containing_polyhedron(model, ideal)
    return _certificate(model, cert.apartment, fl.realize(model, poly))


def apartment_with_tangent(model, poly: fl.FlatPolyhedron, x: md.Vertex,
                           a_x: sp.SphApartment) -> ApartmentCertificate:
    """An apartment containing poly whose link apartment at x is exactly a_x."""
    _link, _log, cset = _direction_data(model, poly, x)
    _check_directions_in_apartment(a_x, cset)
    base = apartment_containing_polyhedron(model, poly)
    big = base.apartment
    # cone at x inside the found apartment spanning the polyhedron
    z0 = big.position(x)
    positions = [big.position(v) for v in fl.realize(model, poly)]
    tag = "A1" if isinstance(model, md.TreeModel) else "A2"
    hs = []
    for n in cx.root_direction_set(tag).covectors:
        base_val = sum(a * b for a, b in zip(n, z0))
        if all(sum(a * b for a, b in zip(n, z)) >= base_val for z in positions):
            hs.append(cx.Halfspace(n, Q(base_val)))
    cone = fl.flat_polyhedron(big, hs)
    cert = cone_apartment(model, cone, a_x, tip=x)
    return _certificate(model, cert.apartment, fl.realize(model, poly),
                        tangent=(x, a_x))


# ---------------------------------------------------------------------------
# Step 2: chains


def apartment_containing_chain(model, chain: Sequence[fl.FlatPolyhedron]) -> ApartmentCertificate:
    """An apartment containing every member of an increasing chain.

    Each member is solved separately; the running intersections of the
    solution apartments are verified to be Weyl polyhedra; the final
    intersection polyhedron (which contains the last, largest member) is
    solved again.
    """
    if not chain:
        raise HullError("empty chain")
    realized = [set(fl.realize(model, p)) for p in chain]
    for small, bigger in zip(realized, realized[1:]):
        if not small <= bigger:
            raise HullError("chain is not increasing")
    certs = [apartment_containing_polyhedron(model, p) for p in chain]
    apartments = [c.apartment for c in certs]
    limit = None
    for i in range(len(chain)):
        common = set(apartments[i].image_set())
        for a in apartments[i + 1:]:
            common &= a.image_set()
        hat = _vertex_polyhedron(apartments[i], sorted(common))
        if not realized[i] <= set(fl.realize(model, hat)):
            raise HullError("running intersection lost a chain member")
        max_facets = 2 if isinstance(model, md.TreeModel) else 6
        if len(hat.halfspaces) > max_facets:
            raise HullError("running intersection is not a Weyl polyhedron")
        limit = hat
    cert = apartment_containing_polyhedron(model, limit)
    required = sorted(set().union(*realized))
    return _certificate(model, cert.apartment, required)


def _vertex_polyhedron(apartment, vertices) -> fl.FlatPolyhedron:
    """Weyl hull of a vertex set in a chart, without ball-clipping facets."""
    hull = fl.chart_fit(apartment, vertices)
    chart_pts = set(apartment.chart_points())
    kept = []
    for h in hull.halfspaces:
        beyond = any(sum(a * b for a, b in zip(h.normal, z)) < h.offset
                     for z in chart_pts)
        if beyond:
            kept.append(h)
    kept += [cx.Halfspace(n, v) for n, v in hull.pins]
    kept += [cx.Halfspace(tuple(-c for c in n), -v) for n, v in hull.pins]
    return fl.flat_polyhedron(apartment, kept)


def intersect_apartments(a1: md.EuclApartment, a2: md.EuclApartment):
    """The intersection of two apartments as a Weyl polyhedron in a1's chart.

    Returns None when the realized intersection is empty.  Halfspaces whose
    tightness is an artifact of ball clipping (no chart point of a1 lies
    beyond them) are dropped, so two equal apartments intersect in the full
    chart with no facets.
    """
    if a1.model is not a2.model and a1.model != a2.model:
        raise HullError("apartments belong to different models")
    common = sorted(a1.image_set() & a2.image_set())
    if not common:
        return None
    return _vertex_polyhedron(a1, common)


# ---------------------------------------------------------------------------
# Step 3 wrapper and parallel sets


def apartment_for_vertices(model, vertices) -> fl.FlatPolyhedron:
    """Weyl hull polyhedron of a bare vertex set on a reconstructed chart."""
    ap = md.apartment_containing_vertices(model, sorted(set(vertices)))
    return fl.chart_fit(ap, vertices)


def parallel_set_ball(model, flat: fl.FlatPolyhedron, radius: int):
    """Vertices of every apartment containing a chart-complete flat.

    Enumerates all maximal in-ball apartments through the flat, takes the
    union of their vertex sets within the given combinatorial radius, and
    verifies at sample points of the flat that the directions of the result
    agree with the union of the link apartments containing the flat's
    tangent there.
    """
    pts = fl.realize(model, flat)
    seed = {flat.apartment.position(v): v for v in pts}
    apartments = md.grow_maximal(model, seed, enumerate_all=True)
    base = md.base_vertex(model)
    out = set()
    for ap in apartments:
        for v in ap.image():
            if md.comb_dist(model, base, v) <= radius:
                out.add(v)
    samples = sorted((v for v in pts if _star_available(model, flat, v)),
                     key=lambda v: (md.comb_dist(model, base, v), v))
    for x in samples[:3]:
        link, _log, cset = _direction_data(model, flat, x)
        if cset is None:
            continue
        allowed = set()
        for a in sp.sph_oracle_apartments(link.building):
            on_cycle = all(v in a.cycle for v in cset.vertices)
            if on_cycle:
                try:
                    _check_directions_in_apartment(a, cset)
                except HullError:
                    continue
                allowed.update(a.cycle)
        got = {w.address for w in md.neighbors(model, x) if w in out}
        if got != allowed:
            raise HullError(f"parallel-set link mismatch at {x}")
    return sorted(out)
