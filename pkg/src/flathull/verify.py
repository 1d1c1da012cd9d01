"""Brute-force oracles and the property-test harness.

The oracle enumerates, by exhaustive seeded chart extension, every flat
apartment piece through a given vertex set inside a bounded chart window.
It shares no code path with the constructive solvers in `hull`, so
agreement between the two is meaningful evidence.
"""

import random

from dataclasses import dataclass
from fractions import Fraction as Q

from . import coxeter as cx
from . import flats as fl
from . import hull as hl
from . import models as md
from . import spherical as sp


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    """Exhaustive answer to `which apartment pieces contain S?`."""
    query: str
    apartments: tuple          # EuclApartment, canonically sorted
    bounds: tuple              # (("window_radius", r), ("node_budget", n))


@dataclass(frozen=True)
class PropertyRecord:
    name: str
    instances: int
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class SuiteReport:
    passed: bool
    records: tuple


@dataclass(frozen=True)
class SuiteConfig:
    tree_q: int = 2
    tree_radius: int = 6
    lattice_q: int = 2
    lattice_radius: int = 3
    samples: int = 10
    seed: int = 0
    fault_injection: bool = False

    def validate(self):
        if self.samples < 0:
            raise OracleError("sample count must be nonnegative")
        if self.tree_radius <= 0 or self.lattice_radius <= 0:
            raise OracleError("radii must be positive")


def oracle_apartments_containing(model, vertices, radius,
                                 node_budget=500_000) -> OracleResult:
    """All window-maximal flat chart embeddings whose image contains S.

    The window is the chart ball of the given radius around a chamber at
    the least vertex of S; enumeration is exhaustive over all chambers
    there, deduplicated by image.  S must fit inside the window.
    """
    vs = sorted(set(vertices))
    if not vs:
        raise OracleError("oracle query needs at least one vertex")
    base = vs[0]
    for v in vs:
        if md.comb_dist(model, base, v) > radius:
            raise OracleError("query set does not fit inside the window")
    dim = 2 if isinstance(model, md.LatticeModel) else 1
    window = set(cx.chart_ball(radius, dim))
    images = {}
    for chamber in _seed_chambers(model, base, set(vs)):
        seed = md.seed_from_chamber(model, chamber)
        found = md.grow_maximal(model, seed, enumerate_all=True,
                                require=vs, window=window,
                                node_budget=node_budget)
        for a in found:
            images.setdefault(frozenset(a.image()), a)
    apartments = tuple(a for _img, a in
                       sorted(images.items(), key=lambda kv: sorted(kv[0])))
    return OracleResult(
        query=f"contains {len(vs)} vertices from {base}",
        apartments=apartments,
        bounds=(("window_radius", radius), ("node_budget", node_budget)))


def _seed_chambers(model, base, query):
    """Seed chambers for the exhaustive search, anchored at the least
    vertex of the query set.

    Every apartment through S contains the highest-dimensional cell of S
    at that vertex, so it suffices to enumerate from chambers containing
    that cell: one chamber of S itself, or the chambers around an edge of
    S, falling back to all chambers at the vertex.
    """
    chambers = md.chambers_at(model, base)
    inside = [c for c in chambers if all(v in query for v in c)]
    if inside:
        return inside[:1]
    edge_partners = {v for c in chambers for v in c} & (query - {base})
    if edge_partners:
        w = sorted(edge_partners)[0]
        return [c for c in chambers if w in c]
    return chambers


def oracle_confirms(result: OracleResult, apartment: md.EuclApartment) -> bool:
    """Does the apartment extend one of the oracle's maximal window pieces?"""
    img = set(apartment.image())
    return any(set(a.image()) <= img for a in result.apartments)


def _query_placements(model, seed: dict, vs, window):
    """All chart placements of the query vertices extending the seed.

    Complete backtracking over the query set only: each vertex may land on
    any open window position at the right distance from everything already
    placed, so every embedding extending the seed restricts to one of
    these placements.
    """
    dsq = md._chart(model).sq_dist
    rest = [s for s in vs if s not in set(seed.values())]
    out = []

    def rec(placed, todo):
        if not todo:
            out.append(dict(placed))
            return
        s = todo[0]
        for z in md._position_window(model, placed, s):
            if z in placed or z not in window:
                continue
            ok = True
            for zz, v in placed.items():
                if md.metric_sq(model, s, v) != dsq(z, zz):
                    ok = False
                    break
            if ok:
                placed[z] = s
                rec(placed, todo[1:])
                del placed[z]

    rec(dict(seed), rest)
    return out


def oracle_confirms_membership(model, vertices, radius,
                               apartment: md.EuclApartment) -> bool:
    """Does the apartment contain a window-maximal piece through the query?

    Sound early-exit form of the oracle check: enumerate every chart
    placement of the query relative to a seed chamber (complete), grow
    each greedily with candidates restricted to the apartment image, and
    accept when the resulting piece is maximal against the full model
    (no window frontier point admits any candidate vertex at all).
    """
    vs = sorted(set(vertices))
    if not vs:
        raise OracleError("oracle query needs at least one vertex")
    base = vs[0]
    for v in vs:
        if md.comb_dist(model, base, v) > radius:
            raise OracleError("query set does not fit inside the window")
    dim = 2 if isinstance(model, md.LatticeModel) else 1
    window = set(cx.chart_ball(radius, dim))
    img = apartment.image_set()
    if not set(vs) <= img:
        return False
    for chamber in _seed_chambers(model, base, set(vs)):
        if not set(chamber) <= img:
            continue
        seed = md.seed_from_chamber(model, chamber)
        for placement in _query_placements(model, seed, vs, window):
            grown = md.grow_maximal(model, placement, window=window,
                                    allowed=img)
            for piece in grown:
                realized = dict(piece.mapping)
                open_pts = [z for z in md._frontier(realized, dim)
                            if z in window]
                if all(not md._candidates(model, realized, z)
                       for z in open_pts):
                    return True
    return False


def tree_lines_by_path_pairs(model: md.TreeModel, radius: int):
    """Independent second enumeration: lines through the base vertex as
    unordered pairs of geodesic paths leaving through distinct edges."""
    base = md.base_vertex(model)

    def paths(v, prev, depth):
        if depth == 0:
            return [(v,)]
        out = []
        for w in md.neighbors(model, v):
            if w != prev and md.in_ball(model, w):
                out.extend((v,) + rest for rest in paths(w, v, depth - 1))
        return out

    full = paths(base, None, radius)
    lines = set()
    for i, p1 in enumerate(full):
        for p2 in full[i + 1:]:
            if p1[1] != p2[1]:
                lines.add(frozenset(p1) | frozenset(p2))
    return sorted(sorted(v for v in line) for line in lines)


# --- property suite ------------------------------------------------------


def property_suite(config: SuiteConfig) -> SuiteReport:
    config.validate()
    records = []
    if config.samples == 0:
        records.append(PropertyRecord(
            "vacuous", 0, True, "warning: zero samples, nothing checked"))
        return SuiteReport(True, tuple(records))

    tree = md.TreeModel(q=config.tree_q, radius=config.tree_radius)
    lattice = md.LatticeModel(q=config.lattice_q,
                              radius=config.lattice_radius)
    rng = random.Random(config.seed)

    axioms_ok = _check_axioms(records, tree, lattice, config)
    if config.fault_injection or not axioms_ok:
        records.append(PropertyRecord(
            "solver-vs-oracle", 0, True, "skipped: axiom check failed"))
        passed = all(r.passed for r in records)
        return SuiteReport(passed, tuple(records))

    _check_spherical(records, config)
    _check_log_isometry(records, lattice, rng, config)
    _check_tree_solver(records, tree, rng, config)
    _check_lattice_solver(records, lattice, rng, config)
    _check_glue_convexity(records, lattice, config)
    _check_intersections(records, lattice, rng, config)
    _check_determinism(records, lattice, config)
    passed = all(r.passed for r in records)
    return SuiteReport(passed, tuple(records))


def _check_axioms(records, tree, lattice, config):
    ok = True
    for name, model in (("tree", tree), ("lattice", lattice)):
        rep = md.verify_axioms(model, config.samples, seed=config.seed)
        if config.fault_injection:
            rep = _inject_fault(model, config)
        records.append(PropertyRecord(
            f"axioms-{name}", rep.chamber_pairs_checked
            + rep.apartment_pairs_checked, rep.passed,
            "; ".join(str(f) for f in rep.failures[:2])))
        ok = ok and rep.passed
    return ok


def _inject_fault(model, config):
    """Swap two vertices of a genuine apartment and re-check isometry."""
    a = (md.tree_line(model, (0,), (1,))
         if isinstance(model, md.TreeModel)
         else md.frame_apartment(model, [[(1,), (), ()], [(), (1,), ()],
                                         [(), (), (1,)]]))
    items = list(a.mapping)
    (z1, v1), (z2, v2) = items[0], items[1]
    items[0], items[1] = (z1, v2), (z2, v1)
    try:
        md.eucl_apartment(model, dict(items))
    except md.ModelInputError as exc:
        return md.AxiomReport(False, 1, 0, (str(exc),))
    return md.AxiomReport(True, 1, 0, ())


def _check_spherical(records, config):
    small = md.LatticeModel(q=2, radius=2)
    b = md.link_at(small, md.base_vertex(small)).building
    oracle = {sp.canonical_cycle(a.cycle) for a in sp.sph_oracle_apartments(b)}
    count = 0
    ok = True
    for v in b.vertices[:4]:
        for w in b.vertices:
            if sp.sph_distance(b, sp.vp(v), sp.vp(w)) is None:
                continue
            try:
                c = sp.make_convex_set(b, (v, w), ())
            except sp.SphericalInputError:
                continue
            a = sp.sph_apartment_containing(b, c)
            count += 1
            if sp.canonical_cycle(a.cycle) not in oracle:
                ok = False
    records.append(PropertyRecord("spherical-solver-in-oracle", count, ok))


def _check_log_isometry(records, lattice, rng, config):
    ap = md.frame_apartment(lattice, [[(1,), (), ()], [(), (1,), ()],
                                      [(), (), (1,)]])
    pts = list(ap.image())
    ok = True
    n = min(config.samples, len(pts))
    for _ in range(n):
        x = pts[rng.randrange(len(pts))]
        sample = [pts[rng.randrange(len(pts))] for _ in range(4)]
        if not md.log_preserves_distances(lattice, x, sample):
            ok = False
    records.append(PropertyRecord("log-map-isometry", n, ok))


def _random_tree_address(model, rng, length):
    addr = (rng.randrange(model.q + 1),)
    while len(addr) < length:
        addr = addr + (rng.randrange(model.q),)
    return addr


def _check_tree_solver(records, tree, rng, config):
    ok = True
    n = 0
    k = min(2, tree.radius - 1)
    for _ in range(config.samples):
        left = _random_tree_address(tree, rng, k)
        right = _random_tree_address(tree, rng, k)
        while right[0] == left[0]:
            right = _random_tree_address(tree, rng, k)
        line = md.tree_line(tree, left, right)
        seg = fl.flat_polyhedron(
            line, [cx.Halfspace((1,), Q(-k)), cx.Halfspace((-1,), Q(-k))])
        cert = hl.apartment_containing_polyhedron(tree, seg)
        rep = hl.verify_certificate(tree, cert)
        res = oracle_apartments_containing(tree, fl.realize(tree, seg), 2 * k)
        n += 1
        if not (rep.passed and oracle_confirms(res, cert.apartment)):
            ok = False
    records.append(PropertyRecord("tree-solver-vs-oracle", n, ok))


def _check_lattice_solver(records, lattice, rng, config):
    ap = md.frame_apartment(lattice, [[(1,), (), ()], [(), (1,), ()],
                                      [(), (), (1,)]])
    shapes = [
        [cx.Halfspace((1, 0), Q(0)), cx.Halfspace((-1, 1), Q(0)),
         cx.Halfspace((0, -1), Q(-2))],
        [cx.Halfspace((1, 0), Q(0)), cx.Halfspace((-1, 0), Q(0)),
         cx.Halfspace((0, 1), Q(0)), cx.Halfspace((0, -1), Q(-2))],
    ]
    ok = True
    n = 0
    for hs in shapes:
        poly = fl.flat_polyhedron(ap, hs)
        cert = hl.apartment_containing_polyhedron(lattice, poly)
        rep = hl.verify_certificate(lattice, cert)
        res = oracle_apartments_containing(
            lattice, fl.realize(lattice, poly), 2)
        n += 1
        if not (rep.passed and oracle_confirms(res, cert.apartment)):
            ok = False
    records.append(PropertyRecord("lattice-solver-vs-oracle", n, ok))


def _check_glue_convexity(records, lattice, config):
    ap = md.frame_apartment(lattice, [[(1,), (), ()], [(), (1,), ()],
                                      [(), (), (1,)]])
    s1 = fl.flat_polyhedron(ap, [cx.Halfspace((1, 0), Q(0)),
                                 cx.Halfspace((-1, 0), Q(0)),
                                 cx.Halfspace((0, 1), Q(0)),
                                 cx.Halfspace((0, -1), Q(-2))])
    s2 = fl.flat_polyhedron(ap, [cx.Halfspace((1, 0), Q(0)),
                                 cx.Halfspace((-1, 0), Q(0)),
                                 cx.Halfspace((0, -1), Q(0)),
                                 cx.Halfspace((0, 1), Q(-1))])
    glued = fl.glue(lattice, s1, s2, ap.vertex((0, 0)))
    rep = fl.is_flat_convex(lattice, fl.realize(lattice, glued))
    records.append(PropertyRecord("glue-post-hoc-convex",
                                  rep.checked_pairs, rep.passed))


def _check_intersections(records, lattice, rng, config):
    roots = cx.root_direction_set("A2").covectors
    ap1 = md.frame_apartment(lattice, [[(1,), (), ()], [(), (1,), ()],
                                       [(), (), (1,)]])
    ap2 = md.frame_apartment(lattice, [[(1,), (), (1,)], [(), (1,), ()],
                                       [(), (), (1,)]])
    inter = hl.intersect_apartments(ap1, ap2)
    ok = (inter is not None
          and all(h.normal in roots for h in inter.halfspaces)
          and len(inter.halfspaces) <= 6)
    records.append(PropertyRecord("intersection-weyl-facets", 1, ok))


def _check_determinism(records, lattice, config):
    ap = md.frame_apartment(lattice, [[(1,), (), ()], [(), (1,), ()],
                                      [(), (), (1,)]])
    tri = fl.flat_polyhedron(ap, [cx.Halfspace((1, 0), Q(0)),
                                  cx.Halfspace((-1, 1), Q(0)),
                                  cx.Halfspace((0, -1), Q(-1))])
    c1 = hl.apartment_containing_polyhedron(lattice, tri)
    c2 = hl.apartment_containing_polyhedron(lattice, tri)
    records.append(PropertyRecord("solver-determinism", 2, c1 == c2))
