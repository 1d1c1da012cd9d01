"""Flat convex polyhedra in chart coordinates: facets, extension, gluing.

A FlatPolyhedron is stored intrinsically as a chart embedding plus exact
rational halfspaces {<normal, p> >= offset}; lower-dimensional polyhedra
additionally carry equality pins for their affine hull.  All geometry is
exact: feasibility, redundancy and facet detection reduce to interval
projections computed by Fourier-Motzkin elimination over Fractions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from . import coxeter as cx
from . import models as md
from . import spherical as sp

Q = Fraction


class PolyhedronError(ValueError):
    """Invalid polyhedron construction or operation."""


class GlueConditionError(ValueError):
    """A gluing precondition failed; `condition` is 1 or 2."""

    def __init__(self, condition: int, message: str):
        super().__init__(message)
        self.condition = condition


# ---------------------------------------------------------------------------
# exact interval projection (Fourier-Motzkin) for rank <= 2


def _fm_eliminate(constraints):
    """Project (alpha, beta, gamma): alpha*s + beta*t >= gamma onto s."""
    pos = [c for c in constraints if c[1] > 0]
    neg = [c for c in constraints if c[1] < 0]
    out = [(c[0], c[2]) for c in constraints if c[1] == 0]
    for (ap, bp, cp) in pos:
        for (am, bm, cm) in neg:
            out.append((-bm * ap + bp * am, -bm * cp + bp * cm))
    return out


def _interval_1d(constraints):
    """Feasible interval of {alpha*s >= gamma}: (lo, hi, feasible)."""
    lo, hi = None, None
    for alpha, gamma in constraints:
        if alpha > 0:
            bound = Q(gamma, alpha)
            if lo is None or bound > lo:
                lo = bound
        elif alpha < 0:
            bound = Q(gamma, alpha)
            if hi is None or bound < hi:
                hi = bound
        elif gamma > 0:
            return None, None, False
    if lo is not None and hi is not None and lo > hi:
        return None, None, False
    return lo, hi, True


def project_interval(halfspaces: Sequence[cx.Halfspace], n):
    """Exact range (lo, hi, feasible) of the functional <n, p> over the set.

    None bounds mean unbounded on that side.  Works for rank-1 and rank-2
    charts.
    """
    if len(n) == 1:
        # value s = n0 * u: rewrite alpha*u >= gamma as (alpha/n0)*s >= gamma
        return _interval_1d([(Q(h.normal[0], n[0]), Q(h.offset))
                             for h in halfspaces])
    n1, n2 = Q(n[0]), Q(n[1])
    denom = n1 * n1 + n2 * n2
    w = (n1 / denom, n2 / denom)   # <n, w> = 1
    p = (-n2, n1)                  # <n, p> = 0
    cons = []
    for h in halfspaces:
        a, b = Q(h.normal[0]), Q(h.normal[1])
        alpha = a * w[0] + b * w[1]
        beta = a * p[0] + b * p[1]
        cons.append((alpha, beta, Q(h.offset)))
    return _interval_1d(_fm_eliminate(cons))


def is_feasible(halfspaces, rank: int) -> bool:
    n = (1,) if rank == 1 else (1, 0)
    return project_interval(halfspaces, n)[2]


def _primitive_halfspace(h: cx.Halfspace) -> cx.Halfspace:
    nums = [Q(c) for c in h.normal]
    off = Q(h.offset)
    denoms = [c.denominator for c in nums] + [off.denominator]
    scale = 1
    for d in denoms:
        scale = scale * d // gcd(scale, d)
    ints = [int(c * scale) for c in nums]
    off_i = off * scale
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    if g == 0:
        raise PolyhedronError("zero normal")
    return cx.Halfspace(tuple(c // g for c in ints), off_i / g)


# ---------------------------------------------------------------------------
# polyhedra


@dataclass(frozen=True)
class FlatPolyhedron:
    apartment: md.EuclApartment
    dimension: int              # affine dimension k
    halfspaces: tuple           # irredundant, facet-supporting
    pins: tuple                 # (normal, value) equalities cutting the hull

    @property
    def rank(self) -> int:
        return len(self.halfspaces[0].normal) if self.halfspaces else (
            len(self.pins[0][0]) if self.pins else
            md._chart(self.apartment.model).dimension)

    def all_constraints(self):
        out = list(self.halfspaces)
        for nrm, val in self.pins:
            out.append(cx.Halfspace(nrm, val))
            out.append(cx.Halfspace(tuple(-c for c in nrm), -val))
        return out

    def contains_chart_point(self, z) -> bool:
        return all(cx.halfspace_contains(h, z) for h in self.all_constraints())


@dataclass(frozen=True)
class Facet:
    parent: FlatPolyhedron
    halfspace: cx.Halfspace
    polyhedron: FlatPolyhedron


def _root_check(model, normals):
    tag = "A1" if isinstance(model, md.TreeModel) else "A2"
    roots = cx.root_direction_set(tag)
    for n in normals:
        if not roots.contains_direction(n):
            raise PolyhedronError(
                f"normal {n} is not a root covector (Weyl condition)")


def flat_polyhedron(apartment: md.EuclApartment, halfspaces: Iterable[cx.Halfspace],
                    check_roots: bool = True) -> FlatPolyhedron:
    """Canonical polyhedron: detects pins, drops redundancy, finds facets."""
    model = apartment.model
    rank = md._chart(model).dimension
    hs = [_primitive_halfspace(h) for h in halfspaces]
    if check_roots:
        _root_check(model, [h.normal for h in hs])
    if not is_feasible(hs, rank):
        raise PolyhedronError("empty polyhedron")
    # split off equality directions (everywhere-tight constraints)
    pins = []
    keep = []
    seen_pin_normals = []
    for h in hs:
        lo, hi, _ = project_interval(hs, h.normal)
        if lo is not None and lo == hi:
            nrm = h.normal
            canon = max(nrm, tuple(-c for c in nrm))
            val = lo if canon == nrm else -lo
            if canon not in seen_pin_normals:
                seen_pin_normals.append(canon)
                pins.append((canon, val))
        else:
            keep.append(h)
    # drop redundant halfspaces (pairwise exact elimination)
    def full_list(subset):
        out = list(subset)
        for nrm, val in pins:
            out.append(cx.Halfspace(nrm, val))
            out.append(cx.Halfspace(tuple(-c for c in nrm), -val))
        return out

    # sequential elimination: test each candidate against the constraints
    # already kept plus the ones not yet visited, so mutually redundant
    # pairs keep exactly one member instead of losing both
    irredundant = []
    pool = sorted(set(keep), key=lambda h: (h.normal, h.offset))
    for i, h in enumerate(pool):
        rest = irredundant + pool[i + 1:]
        lo, _, feas = project_interval(full_list(rest), h.normal)
        if not feas or lo is None or lo < h.offset:
            irredundant.append(h)
    dim = _affine_dim(full_list(irredundant), rank)
    return FlatPolyhedron(apartment, dim, tuple(irredundant), tuple(sorted(pins)))


def _affine_dim(constraints, rank: int) -> int:
    if not is_feasible(constraints, rank):
        return -1
    if rank == 1:
        lo, hi, _ = project_interval(constraints, (1,))
        return 0 if (lo is not None and lo == hi) else 1
    degenerate = []
    probes = [h.normal for h in constraints] + [(1, 0), (0, 1)]
    for n in probes:
        lo, hi, _ = project_interval(constraints, n)
        if lo is not None and lo == hi:
            degenerate.append(n)
    if not degenerate:
        return 2
    lo_u, hi_u, _ = project_interval(constraints, (1, 0))
    lo_v, hi_v, _ = project_interval(constraints, (0, 1))
    if lo_u is not None and lo_u == hi_u and lo_v is not None and lo_v == hi_v:
        return 0
    return 1


def facets(p: FlatPolyhedron):
    """One facet per supporting halfspace, in deterministic order."""
    out = []
    for h in p.halfspaces:
        slice_cons = p.all_constraints() + [
            cx.Halfspace(tuple(-c for c in h.normal), -h.offset)]
        if _affine_dim(slice_cons, p.rank) != p.dimension - 1:
            continue
        sub = flat_polyhedron(p.apartment, slice_cons, check_roots=False)
        out.append(Facet(p, h, sub))
    return out


def extension_beyond_facet(p: FlatPolyhedron, f: Facet) -> FlatPolyhedron:
    """Drop the halfspace supporting a facet; the result has one facet less."""
    if f.halfspace not in p.halfspaces:
        raise PolyhedronError("not a facet of this polyhedron")
    remaining = [h for h in p.halfspaces if h != f.halfspace]
    remaining += [cx.Halfspace(n, v) for n, v in p.pins]
    remaining += [cx.Halfspace(tuple(-c for c in n), -v) for n, v in p.pins]
    out = flat_polyhedron(p.apartment, remaining)
    if len(facets(out)) != len(facets(p)) - 1:
        raise PolyhedronError("extension did not reduce the facet count by 1")
    return out


def realize(model, p: FlatPolyhedron):
    """Model vertices of the polyhedron (chart points satisfying everything)."""
    out = [v for z, v in p.apartment.mapping if p.contains_chart_point(z)]
    if not out:
        raise PolyhedronError("polyhedron has no realized vertices in the ball")
    return sorted(out)


def chart_fit(apartment: md.EuclApartment, vertices) -> FlatPolyhedron:
    """Smallest Weyl polyhedron in the chart containing the given vertices."""
    tag = "A1" if isinstance(apartment.model, md.TreeModel) else "A2"
    roots = cx.root_direction_set(tag)
    pos = [apartment.position(v) for v in sorted(set(vertices))]
    if not pos:
        raise PolyhedronError("cannot fit a polyhedron to an empty set")
    hs = []
    for n in roots.covectors:
        lo = min(sum(a * b for a, b in zip(n, z)) for z in pos)
        hs.append(cx.Halfspace(n, Q(lo)))
    return flat_polyhedron(apartment, hs)


# ---------------------------------------------------------------------------
# flat convexity of vertex sets


@dataclass(frozen=True)
class FlatConvexReport:
    passed: bool
    reason: str
    positions: tuple     # (vertex, chart point) evidence
    checked_pairs: int


def is_flat_convex(model, vertices, chart: Optional[md.EuclApartment] = None):
    """Whether a vertex set is flat (chart-isometric) and convex (hull-closed)."""
    vs = sorted(set(vertices))
    if not vs:
        return FlatConvexReport(True, "", (), 0)
    if chart is None:
        try:
            chart = md.apartment_containing_vertices(model, vs)
        except (md.TruncationError, md.ModelInputError) as exc:
            return FlatConvexReport(False, f"no flat chart: {exc}", (), 0)
    ch = md._chart(model)
    pos = {}
    for v in vs:
        try:
            pos[v] = chart.position(v)
        except md.ModelInputError:
            return FlatConvexReport(False, f"vertex {v} missing from chart", (), 0)
    checked = 0
    for v1, v2 in itertools.combinations(vs, 2):
        checked += 1
        if md.metric_sq(model, v1, v2) != ch.sq_dist(pos[v1], pos[v2]):
            return FlatConvexReport(
                False, f"distance mismatch between {v1} and {v2}",
                tuple(sorted(pos.items())), checked)
    hull = chart_fit(chart, vs)
    image = {pos[v] for v in vs}
    for z, _ in chart.mapping:
        if hull.contains_chart_point(z) and z not in image:
            return FlatConvexReport(
                False, f"hull point {z} not in the set (not convex)",
                tuple(sorted(pos.items())), checked)
    return FlatConvexReport(True, "", tuple(sorted(pos.items())), checked)


# ---------------------------------------------------------------------------
# gluing (two flat convex pieces meeting at a point)


def _log_chart_coords(model, entries, direction_map):
    """Cone chart coordinates of log entries given link-label placements."""
    out = {}
    for (v, cell, coords, _r) in entries:
        if cell is None:
            out[v] = (0,) * md._chart(model).dimension
            continue
        kind, label = cell
        if isinstance(model, md.TreeModel):
            out[v] = (int(coords[0]) * direction_map[label],)
        elif kind == "edge":
            d1, d2 = direction_map[label[0]], direction_map[label[1]]
            al, be = coords
            out[v] = (al * d1[0] + be * d2[0], al * d1[1] + be * d2[1])
        else:
            d = direction_map[label]
            out[v] = (coords[0] * d[0], coords[0] * d[1])
    return {v: tuple(int(c) if Q(c).denominator == 1 else c for c in z)
            for v, z in out.items()}


def tangent_directions(model, poly: FlatPolyhedron, x) -> list:
    """Unit chart directions of the tangent cone of the polyhedron at x."""
    z0 = poly.apartment.position(x)
    tight = [h for h in poly.halfspaces if h.eval(z0) == h.offset]
    for n, val in poly.pins:
        tight.append(cx.Halfspace(n, val))
        tight.append(cx.Halfspace(tuple(-c for c in n), -val))
    deltas = ((1,), (-1,)) if isinstance(model, md.TreeModel) else cx.HEX_DIRECTIONS
    return [d for d in deltas
            if all(sum(a * b for a, b in zip(h.normal, d)) >= 0 for h in tight)]


def tangent_subcomplex(model, poly: FlatPolyhedron, x):
    """Link labels (vertices, edges) spanned by the tangent cone at x.

    Unlike the raw log image, this includes the full arc of the tangent
    cone: consecutive hexagon directions inside the cone contribute their
    connecting link edge even when no realized vertex lies strictly inside
    that sector.
    """
    z0 = poly.apartment.position(x)
    realized = dict(poly.apartment.mapping)
    dirs = tangent_directions(model, poly, x)

    def label(d):
        w = tuple(a + b for a, b in zip(z0, d))
        if w not in realized:
            raise md.TruncationError(
                "tangent direction leaves the clipped chart")
        return realized[w].address

    verts = {label(d) for d in dirs}
    edges = set()
    if not isinstance(model, md.TreeModel):
        hexd = cx.HEX_DIRECTIONS
        for i in range(6):
            d1, d2 = hexd[i], hexd[(i + 1) % 6]
            if d1 in dirs and d2 in dirs:
                edges.add(tuple(sorted((label(d1), label(d2)))))
    return verts, edges


def _union_directions(model, link, logs):
    """Link subcomplex spanned by the directions of several log images."""
    verts = set()
    edges = set()
    for entries in logs:
        for (_v, cell, _coords, _r) in entries:
            if cell is None:
                continue
            kind, label = cell
            if kind == "vertex":
                verts.add(label)
            else:
                verts.update(label)
                edges.add(label)
    return verts, edges


def glue(model, y1: FlatPolyhedron, y2: FlatPolyhedron, x: md.Vertex) -> FlatPolyhedron:
    """Union of two realized flat polyhedra meeting at x, re-charted.

    Verifies the two gluing conditions by computing logarithm images at x:
    (1) the union of the log images is convex in the tangent cone, and
    (2) the log images intersect exactly in the log image of the
    intersection.  Returns the union as a convex polyhedron in one chart.
    """
    s1 = set(realize(model, y1))
    s2 = set(realize(model, y2))
    if x not in s1 or x not in s2:
        raise PolyhedronError("base point must lie in both pieces")
    log1 = md.log_at(model, x, sorted(s1), chart=y1.apartment)
    log2 = md.log_at(model, x, sorted(s2), chart=y2.apartment)
    link = log1.link
    v1a, e1a = tangent_subcomplex(model, y1, x)
    v2a, e2a = tangent_subcomplex(model, y2, x)
    verts, edges = v1a | v2a, e1a | e2a
    # condition (1), link level: directions must span a convex spherical set
    try:
        cset = sp.make_convex_set(link.building, verts, edges)
    except sp.SphericalInputError as exc:
        raise GlueConditionError(1, f"union of tangent directions: {exc}")
    hexagon = sp.sph_apartment_containing(link.building, cset)
    if isinstance(model, md.TreeModel):
        direction_map = {hexagon.cycle[0]: 1, hexagon.cycle[1]: -1}
    else:
        direction_map = {lbl: cx.HEX_DIRECTIONS[i]
                         for i, lbl in enumerate(hexagon.cycle)}
    c1 = _log_chart_coords(model, log1.entries, direction_map)
    c2 = _log_chart_coords(model, log2.entries, direction_map)
    # condition (2): images intersect exactly in the image of the intersection
    inter_pts = set(c1.values()) & set(c2.values())
    inter_img = {c1[v] for v in (s1 & s2)}
    if any(c1[v] != c2[v] for v in (s1 & s2)):
        raise GlueConditionError(2, "log images disagree on the intersection")
    if inter_pts != inter_img:
        raise GlueConditionError(
            2, "log images overlap outside the intersection")
    # condition (1), cone level: the union must be hull-closed
    union_coords = {}
    for v in sorted(s1):
        union_coords[v] = c1[v]
    for v in sorted(s2):
        if v in union_coords and union_coords[v] != c2[v]:
            raise GlueConditionError(2, "incompatible placements of a shared vertex")
        union_coords[v] = c2[v]
    placed = set(union_coords.values())
    hull_ok = _integer_hull_closed(model, placed)
    if not hull_ok:
        raise GlueConditionError(1, "union of log images is not convex")
    # the union is flat: the merged chart assignment must be isometric
    embedding = md.eucl_apartment(model, {z: v for v, z in union_coords.items()})
    return chart_fit(embedding, sorted(union_coords))


def _integer_hull_closed(model, points) -> bool:
    tag = "A1" if isinstance(model, md.TreeModel) else "A2"
    roots = cx.root_direction_set(tag)
    hs = []
    for n in roots.covectors:
        lo = min(sum(a * b for a, b in zip(n, z)) for z in points)
        hs.append(cx.Halfspace(n, Q(lo)))
    if len(next(iter(points))) == 1:
        los = [z[0] for z in points]
        return all((z,) in points for z in range(min(los), max(los) + 1))
    us = [z[0] for z in points]
    vs = [z[1] for z in points]
    for u in range(min(us), max(us) + 1):
        for v in range(min(vs), max(vs) + 1):
            z = (u, v)
            if all(cx.halfspace_contains(h, z) for h in hs) and z not in points:
                return False
    return True
