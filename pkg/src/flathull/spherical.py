"""Finite spherical buildings of dimension 0 and 1 with exact CAT(1) metric.

Dimension 0: finite point sets, all pairwise distances pi.
Dimension 1: generalized m-gons for m in {2, 3} -- bipartite graphs of
girth 2m and diameter m with edges of length pi/m.

All distances are stored as Fractions in units of pi, so the diameter is 1
and an edge has length 1/m.  Every computation is exact.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Q = Fraction


class SphericalInputError(ValueError):
    """Invalid input to a spherical-building operation."""


# ---------------------------------------------------------------------------
# buildings


@dataclass(frozen=True)
class SphericalBuilding:
    dimension: int
    m: Optional[int]  # gonality for dim 1, None for dim 0
    vertices: tuple   # sorted labels
    edges: tuple      # sorted tuple of sorted 2-tuples (dim 1 only)

    def chambers(self):
        return self.vertices if self.dimension == 0 else self.edges

    def edge_length(self) -> Q:
        return Q(1, self.m)


def points_building(labels: Iterable) -> SphericalBuilding:
    vs = tuple(sorted(set(labels)))
    if not vs:
        raise SphericalInputError("a 0-dimensional building needs at least one point")
    return SphericalBuilding(0, None, vs, ())


def polygon_building(m: int, edges: Iterable) -> SphericalBuilding:
    """Generalized m-gon from its edge list; validates all invariants."""
    if m not in (2, 3):
        raise SphericalInputError(f"unsupported gonality m={m}")
    es = tuple(sorted({tuple(sorted(e)) for e in edges}))
    vs = tuple(sorted({v for e in es for v in e}))
    b = SphericalBuilding(1, m, vs, es)
    _validate_polygon(b)
    return b


def _validate_polygon(b: SphericalBuilding) -> None:
    adj = adjacency(b)
    if any(len(adj[v]) < 2 for v in b.vertices):
        raise SphericalInputError("every vertex must have degree >= 2")
    dist = graph_distances(b)
    diam = max(max(row.values()) for row in dist.values())
    if len(dist[b.vertices[0]]) != len(b.vertices):
        raise SphericalInputError("graph must be connected")
    if diam != b.m:
        raise SphericalInputError(f"graph diameter {diam} != m = {b.m}")
    # bipartite + girth exactly 2m
    color = {b.vertices[0]: 0}
    stack = [b.vertices[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in color:
                color[w] = 1 - color[v]
                stack.append(w)
            elif color[w] == color[v]:
                raise SphericalInputError("graph must be bipartite")
    if _girth(b) != 2 * b.m:
        raise SphericalInputError(f"graph girth must be exactly {2 * b.m}")


@functools.lru_cache(maxsize=None)
def adjacency(b: SphericalBuilding):
    adj = {v: [] for v in b.vertices}
    for a, c in b.edges:
        adj[a].append(c)
        adj[c].append(a)
    return {v: tuple(sorted(ws)) for v, ws in adj.items()}


@functools.lru_cache(maxsize=None)
def graph_distances(b: SphericalBuilding):
    adj = adjacency(b)
    out = {}
    for s in b.vertices:
        d = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in d:
                        d[w] = d[v] + 1
                        nxt.append(w)
            frontier = nxt
        out[s] = d
    return out


def _girth(b: SphericalBuilding) -> int:
    adj = adjacency(b)
    best = None
    for s in b.vertices:
        # BFS shortest cycle through s
        dist = {s: 0}
        parent = {s: None}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        parent[w] = v
                        nxt.append(w)
                    elif parent[v] != w and dist[w] >= dist[v]:
                        c = dist[v] + dist[w] + 1
                        if best is None or c < best:
                            best = c
            frontier = nxt
    return best if best is not None else 0


def complete_bipartite_building(side1: Iterable, side2: Iterable) -> SphericalBuilding:
    """Join of two point sets: a generalized 2-gon."""
    s1, s2 = sorted(set(side1)), sorted(set(side2))
    return polygon_building(2, [(a, b) for a in s1 for b in s2])


def _fq_normalize(vec, q):
    """Scale a nonzero F_q vector so its first nonzero entry is 1."""
    lead = next(x for x in vec if x % q != 0)
    inv = next(i for i in range(1, q) if (i * lead) % q == 1)
    return tuple((x * inv) % q for x in vec)


def projective_plane_building(q: int) -> SphericalBuilding:
    """Incidence graph of PG(2,q) -- a generalized 3-gon (Heawood for q=2)."""
    if q not in (2, 3):
        raise SphericalInputError(f"unsupported plane order q={q}")
    vecs = set()
    rng = range(q)
    for a in rng:
        for b in rng:
            for c in rng:
                if (a, b, c) != (0, 0, 0):
                    vecs.add(_fq_normalize((a, b, c), q))
    vecs = sorted(vecs)
    edges = []
    for p in vecs:
        for l in vecs:
            if sum(x * y for x, y in zip(p, l)) % q == 0:
                edges.append((("pt", p), ("ln", l)))
    return polygon_building(3, edges)


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class SphPoint:
    """A vertex, or an interior point of an edge with exact rational parameter."""

    vertex: Optional[object] = None
    edge: Optional[tuple] = None
    t: Optional[Q] = None

    def is_vertex(self) -> bool:
        return self.vertex is not None


def vp(v) -> SphPoint:
    return SphPoint(vertex=v)


def ep(a, b, t) -> SphPoint:
    t = Q(t)
    if not 0 < t < 1:
        raise SphericalInputError("edge parameter must lie strictly in (0,1)")
    if b < a:
        a, b, t = b, a, 1 - t
    return SphPoint(edge=(a, b), t=t)


def point_key(p: SphPoint):
    if p.is_vertex():
        return (0, p.vertex, Q(0))
    return (1, p.edge, p.t)


def point_in_building(b: SphericalBuilding, p: SphPoint) -> bool:
    if p.is_vertex():
        return p.vertex in b.vertices
    return b.dimension == 1 and p.edge in b.edges


def _ends(p: SphPoint):
    """(vertex, distance-to-it in edge units) pairs reaching p."""
    if p.is_vertex():
        return ((p.vertex, Q(0)),)
    a, b = p.edge
    return ((a, p.t), (b, 1 - p.t))


@functools.lru_cache(maxsize=None)
def sph_distance(b: SphericalBuilding, p: SphPoint, q: SphPoint) -> Q:
    """CAT(1) distance in units of pi (path metric, capped at 1)."""
    for x in (p, q):
        if not point_in_building(b, x):
            raise SphericalInputError(f"point {x} not in building")
    if p == q:
        return Q(0)
    if b.dimension == 0:
        return Q(1)
    m = b.m
    dist = graph_distances(b)
    best = None
    if not p.is_vertex() and not q.is_vertex() and p.edge == q.edge:
        best = abs(p.t - q.t) * Q(1, m)
    for x, dp in _ends(p):
        for y, dq in _ends(q):
            cand = (dp + dist[x][y] + dq) * Q(1, m)
            if best is None or cand < best:
                best = cand
    return min(best, Q(1))


# ---------------------------------------------------------------------------
# geodesics (unique below distance pi; by initial direction at distance pi)


def vertex_geodesics(b: SphericalBuilding, a, c):
    """All shortest vertex paths between two vertices."""
    dist = graph_distances(b)
    adj = adjacency(b)

    def extend(path):
        v = path[-1]
        if v == c:
            return [tuple(path)]
        out = []
        for w in adj[v]:
            if dist[w][c] == dist[v][c] - 1:
                out.extend(extend(path + [w]))
        return out

    return extend([a])


def the_geodesic(b: SphericalBuilding, p: SphPoint, q: SphPoint):
    """The unique geodesic between points at distance < pi, as a point list.

    The result is a list of SphPoints [p, v1, ..., vk, q] whose consecutive
    members lie on a common closed edge.
    """
    d = sph_distance(b, p, q)
    if d >= 1:
        raise SphericalInputError("geodesic not unique at distance pi")
    if p == q:
        return [p]
    if b.dimension == 0:
        raise SphericalInputError("no short geodesics in a 0-dimensional building")
    m = b.m
    dist = graph_distances(b)
    routes = set()
    if not p.is_vertex() and not q.is_vertex() and p.edge == q.edge:
        if abs(p.t - q.t) * Q(1, m) == d:
            routes.add((p, q))
    for x, dp in _ends(p):
        for y, dq in _ends(q):
            if (dp + dist[x][y] + dq) * Q(1, m) != d:
                continue
            for path in vertex_geodesics(b, x, y):
                pts = [p] + [vp(v) for v in path] + [q]
                clean = [pts[0]]
                for z in pts[1:]:
                    if z != clean[-1]:
                        clean.append(z)
                routes.add(tuple(clean))
    if len(routes) != 1:
        raise SphericalInputError(
            f"expected a unique geodesic, found {len(routes)} between {p} and {q}"
        )
    return list(next(iter(routes)))


def _common_edge(b: SphericalBuilding, p: SphPoint, q: SphPoint):
    if not p.is_vertex():
        e = p.edge
        if q.is_vertex():
            if q.vertex in e:
                return e
        elif q.edge == e:
            return e
        raise SphericalInputError("points do not share an edge")
    if not q.is_vertex():
        return _common_edge(b, q, p)
    e = tuple(sorted((p.vertex, q.vertex)))
    if e in b.edges:
        return e
    raise SphericalInputError("points do not share an edge")


def _edge_pos(p: SphPoint, e) -> Q:
    if p.is_vertex():
        return Q(0) if p.vertex == e[0] else Q(1)
    return p.t


def path_length(b: SphericalBuilding, pts) -> Q:
    total = Q(0)
    for p, q in zip(pts, pts[1:]):
        e = _common_edge(b, p, q)
        total += abs(_edge_pos(p, e) - _edge_pos(q, e)) * Q(1, b.m)
    return total


def point_along(b: SphericalBuilding, pts, dist: Q) -> SphPoint:
    """Point at arc distance `dist` (units of pi) along a geodesic point list."""
    dist = Q(dist)
    if dist == 0:
        return pts[0]
    acc = Q(0)
    for p, q in zip(pts, pts[1:]):
        e = _common_edge(b, p, q)
        sp, sq = _edge_pos(p, e), _edge_pos(q, e)
        seg = abs(sq - sp) * Q(1, b.m)
        if acc + seg >= dist:
            frac = (dist - acc) / seg
            pos = sp + (sq - sp) * frac
            if pos == 0:
                return vp(e[0])
            if pos == 1:
                return vp(e[1])
            return ep(e[0], e[1], pos)
        acc += seg
    raise SphericalInputError("distance exceeds path length")


def geodesic_with_initial_edge(b: SphericalBuilding, p, pbar, first):
    """The vertex geodesic of length m from p to an opposite vertex pbar
    whose first edge goes to `first`; unique by the girth bound."""
    m = b.m
    dist = graph_distances(b)
    if dist[p][pbar] != m:
        raise SphericalInputError("vertices are not opposite")
    if dist[first][pbar] != m - 1:
        raise SphericalInputError("no geodesic to the antipode starts with this edge")
    paths = [ (p,) + path for path in vertex_geodesics(b, first, pbar) ]
    if len(paths) != 1:
        raise SphericalInputError("geodesic with prescribed initial edge not unique")
    return paths[0]


# ---------------------------------------------------------------------------
# apartments


@dataclass(frozen=True)
class SphApartment:
    building: SphericalBuilding
    cycle: tuple  # dim 0: sorted pair of labels; dim 1: canonical 2m-cycle

    @property
    def dimension(self) -> int:
        return self.building.dimension

    def edge_set(self):
        n = len(self.cycle)
        if self.dimension == 0:
            return ()
        return tuple(sorted(
            tuple(sorted((self.cycle[i], self.cycle[(i + 1) % n]))) for i in range(n)
        ))

    def vertex_set(self):
        return tuple(sorted(self.cycle))


def canonical_cycle(cycle: Sequence) -> tuple:
    """Least rotation/reflection normal form of a cycle."""
    c = tuple(cycle)
    n = len(c)
    cands = []
    for d in (c, tuple(reversed(c))):
        for i in range(n):
            cands.append(d[i:] + d[:i])
    return min(cands)


def make_apartment(b: SphericalBuilding, data) -> SphApartment:
    if b.dimension == 0:
        pair = tuple(sorted(data))
        if len(pair) != 2 or any(v not in b.vertices for v in pair):
            raise SphericalInputError("a 0-dimensional apartment is a pair of points")
        return SphApartment(b, pair)
    cyc = tuple(data)
    if len(cyc) != 2 * b.m or len(set(cyc)) != len(cyc):
        raise SphericalInputError(f"an apartment must be a {2 * b.m}-cycle")
    for i in range(len(cyc)):
        e = tuple(sorted((cyc[i], cyc[(i + 1) % len(cyc)])))
        if e not in b.edges:
            raise SphericalInputError("cycle edge not in the building")
    return SphApartment(b, canonical_cycle(cyc))


def point_on_apartment(a: SphApartment, p: SphPoint) -> bool:
    if p.is_vertex():
        return p.vertex in a.cycle
    return p.edge in a.edge_set()


def apartment_antipode(a: SphApartment, v):
    """The opposite vertex of a cycle vertex."""
    if a.dimension == 0:
        return a.cycle[1] if v == a.cycle[0] else a.cycle[0]
    i = a.cycle.index(v)
    return a.cycle[(i + a.building.m) % len(a.cycle)]


def apartment_point_antipode(a: SphApartment, p: SphPoint) -> SphPoint:
    """The point of the apartment circle at distance pi from p."""
    if p.is_vertex():
        return vp(apartment_antipode(a, p.vertex))
    x, y = p.edge
    xbar, ybar = apartment_antipode(a, x), apartment_antipode(a, y)
    return ep(xbar, ybar, p.t)


def apartment_directions_at(a: SphApartment, y: SphPoint):
    """The two directions of an apartment at one of its points.

    Direction labels follow the link convention: at a vertex v the label is
    the neighbor vertex along the cycle; at an interior point the label is
    the edge endpoint the direction points to.
    """
    if y.is_vertex():
        i = a.cycle.index(y.vertex)
        n = len(a.cycle)
        return tuple(sorted((a.cycle[(i - 1) % n], a.cycle[(i + 1) % n])))
    return y.edge


def sph_oracle_apartments(b: SphericalBuilding):
    """All apartments by exhaustive enumeration (pairs or 2m-cycles)."""
    if b.dimension == 0:
        vs = b.vertices
        return [SphApartment(b, (vs[i], vs[j]))
                for i in range(len(vs)) for j in range(i + 1, len(vs))]
    n = 2 * b.m
    adj = adjacency(b)
    cycles = set()

    def dfs(path):
        v = path[-1]
        if len(path) == n:
            if path[0] in adj[v]:
                cycles.add(canonical_cycle(path))
            return
        for w in adj[v]:
            if w not in path and w > path[0]:
                dfs(path + [w])

    for s in b.vertices:
        dfs([s])
    # A cycle of length exactly 2m is automatically isometrically embedded
    # (any chord would create a cycle shorter than the girth).
    return [SphApartment(b, c) for c in sorted(cycles)]


# ---------------------------------------------------------------------------
# convex spherical subsets


@dataclass(frozen=True)
class SphConvexSet:
    building: SphericalBuilding
    vertices: tuple
    edges: tuple

    def is_empty(self) -> bool:
        return not self.vertices

    def point_set(self):
        return tuple(vp(v) for v in self.vertices)


def make_convex_set(b: SphericalBuilding, vertices=(), edges=()) -> SphConvexSet:
    vs = tuple(sorted(set(vertices)))
    es = tuple(sorted({tuple(sorted(e)) for e in edges}))
    for v in vs:
        if v not in b.vertices:
            raise SphericalInputError(f"vertex {v!r} not in building")
    for e in es:
        if b.dimension == 0 or e not in b.edges:
            raise SphericalInputError(f"edge {e!r} not in building")
        if e[0] not in vs or e[1] not in vs:
            raise SphericalInputError("convex set edges must bring their endpoints")
    c = SphConvexSet(b, vs, es)
    ok, why = check_convex_spherical(c)
    if not ok:
        raise SphericalInputError(f"not a convex spherical subcomplex: {why}")
    return c


def check_convex_spherical(c: SphConvexSet):
    """Exact convexity + sphericity check for a subcomplex.

    A subcomplex is convex and isometric to a subset of a circle iff it is
    empty, at most two vertices pairwise at distance pi, a geodesically
    embedded edge path of at most m edges, or a full apartment cycle.
    """
    b, vs, es = c.building, c.vertices, c.edges
    if not vs:
        return True, ""
    if b.dimension == 0:
        if len(vs) > 2:
            return False, "more than two points of a 0-dimensional building"
        return True, ""
    dist = graph_distances(b)
    if not es:
        if len(vs) == 1:
            return True, ""
        if len(vs) == 2 and dist[vs[0]][vs[1]] >= b.m:
            return True, ""
        return False, "isolated vertices at distance < pi"
    deg = {v: 0 for v in vs}
    for a, bb in es:
        deg[a] += 1
        deg[bb] += 1
    if any(d > 2 for d in deg.values()):
        return False, "a vertex of degree > 2 cannot embed in a circle"
    ends = [v for v in vs if deg[v] <= 1]
    if len(es) == len(vs) and not ends:
        # single cycle: must be a full apartment
        if len(vs) == 2 * b.m and _connected(vs, es):
            return True, ""
        return False, "a cycle other than a 2m-cycle"
    if len(es) != len(vs) - 1 or len(ends) != 2 or not _connected(vs, es):
        return False, "not a single path"
    path = _trace_path(vs, es, min(ends))
    k = len(path) - 1
    if k > b.m:
        return False, "paths longer than m edges are never convex"
    for i in range(len(path)):
        for j in range(i + 1, len(path)):
            if dist[path[i]][path[j]] != j - i:
                return False, f"shortcut between {path[i]!r} and {path[j]!r}"
    return True, ""


def _connected(vs, es) -> bool:
    if not vs:
        return True
    adj = {v: [] for v in vs}
    for a, b in es:
        adj[a].append(b)
        adj[b].append(a)
    seen = {vs[0]}
    stack = [vs[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vs)


def _trace_path(vs, es, start):
    adj = {v: [] for v in vs}
    for a, b in es:
        adj[a].append(b)
        adj[b].append(a)
    path = [start]
    prev = None
    while True:
        nxt = [w for w in adj[path[-1]] if w != prev]
        if not nxt:
            return path
        prev = path[-1]
        path.append(nxt[0])


def convex_set_directions_at(c: SphConvexSet, v):
    """Direction labels of the subcomplex at one of its vertices."""
    return tuple(sorted(w for e in c.edges for w in e if v in e and w != v))


# ---------------------------------------------------------------------------
# building maps


@dataclass(frozen=True)
class BuildingMap:
    source: SphericalBuilding
    target: SphericalBuilding
    vertex_map: tuple  # sorted tuple of (source vertex, target SphPoint)

    def mapping(self):
        return dict(self.vertex_map)

    def image(self, p: SphPoint) -> SphPoint:
        vm = self.mapping()
        if p.is_vertex():
            return vm[p.vertex]
        a, b = p.edge
        geod = the_geodesic(self.target, vm[a], vm[b])
        return point_along(self.target, geod, p.t * Q(1, self.source.m))


def building_map(source, target, vertex_map, validate=True) -> BuildingMap:
    vm = tuple(sorted(vertex_map.items(), key=lambda kv: kv[0]))
    f = BuildingMap(source, target, vm)
    if validate:
        err = validate_building_map(f)
        if err:
            raise SphericalInputError(err)
    return f


def _canonical_building(b: SphericalBuilding):
    """Relabel vertices 0..n-1 in sorted order (validation is label-agnostic)."""
    idx = {v: i for i, v in enumerate(b.vertices)}
    es = tuple(sorted(tuple(sorted((idx[a], idx[c]))) for a, c in b.edges))
    return SphericalBuilding(b.dimension, b.m, tuple(range(len(b.vertices))), es), idx


def _canonical_point(p: SphPoint, idx):
    if p.is_vertex():
        return vp(idx[p.vertex])
    a, c = p.edge
    return ep(idx[a], idx[c], p.t)


def validate_building_map(f: BuildingMap):
    """Check dimensions, totality, chamber isometry, surjectivity and the
    1-Lipschitz property on vertices and edge midpoints.  Returns an error
    string, or None.

    Runs on a canonically relabeled copy so results cache across maps that
    differ only in vertex labels; failures rerun uncached on the original
    map to report its own labels.
    """
    try:
        src, si = _canonical_building(f.source)
        tgt, ti = _canonical_building(f.target)
        vm = {si[v]: _canonical_point(p, ti) for v, p in f.mapping().items()}
        key = BuildingMap(src, tgt, tuple(sorted(vm.items())))
    except (KeyError, SphericalInputError):
        return _validate_building_map(f)
    if _validate_building_map_cached(key) is None:
        return None
    return _validate_building_map(f)


@functools.lru_cache(maxsize=None)
def _validate_building_map_cached(f: BuildingMap):
    return _validate_building_map(f)


def _validate_building_map(f: BuildingMap):
    b1, b2 = f.source, f.target
    vm = f.mapping()
    if b1.dimension != b2.dimension:
        return "source and target dimensions differ"
    for v in b1.vertices:
        if v not in vm or not point_in_building(b2, vm[v]):
            return f"vertex {v!r} not mapped into the target"
    rep = check_chamber_isometry(f)
    if not rep.passed:
        return f"map is not isometric on chamber {rep.violations[0][0]!r}"
    if not _surjective(f):
        return "map is not surjective"
    probes = [vp(v) for v in b1.vertices]
    if b1.dimension == 1:
        probes += [ep(a, b, Q(1, 2)) for a, b in b1.edges]
    imgs = [f.image(p) for p in probes]
    for i in range(len(probes)):
        for j in range(i + 1, len(probes)):
            if sph_distance(b2, imgs[i], imgs[j]) > sph_distance(b1, probes[i], probes[j]):
                return f"map expands the distance between {probes[i]} and {probes[j]}"
    return None


def _surjective(f: BuildingMap) -> bool:
    b1, b2 = f.source, f.target
    vm = f.mapping()
    if b1.dimension == 0:
        return {p.vertex for p in vm.values()} >= set(b2.vertices)
    covered = {e: [] for e in b2.edges}
    hit_vertices = set()

    def add_point(p):
        if p.is_vertex():
            hit_vertices.add(p.vertex)

    for v in b1.vertices:
        add_point(vm[v])
    for a, b in b1.edges:
        geod = the_geodesic(b2, vm[a], vm[b])
        for p, q in zip(geod, geod[1:]):
            e = _common_edge(b2, p, q)
            lo, hi = sorted((_edge_pos(p, e), _edge_pos(q, e)))
            covered[e].append((lo, hi))
        for p in geod:
            add_point(p)
    if set(b2.vertices) - hit_vertices:
        return False
    for e, ivs in covered.items():
        ivs.sort()
        reach = Q(0)
        for lo, hi in ivs:
            if lo > reach:
                return False
            reach = max(reach, hi)
        if reach < 1:
            return False
    return True


@dataclass(frozen=True)
class ChamberIsometryReport:
    passed: bool
    violations: tuple  # (chamber, (point, point)) pairs


def check_chamber_isometry(f: BuildingMap) -> ChamberIsometryReport:
    """Verify that the map preserves distances on every chamber."""
    b1, b2 = f.source, f.target
    vm = f.mapping()
    bad = []
    if b1.dimension == 0:
        return ChamberIsometryReport(True, ())
    for a, b in b1.edges:
        want = b1.edge_length()
        got = sph_distance(b2, vm[a], vm[b])
        if got != want:
            bad.append(((a, b), (vp(a), vp(b))))
    return ChamberIsometryReport(not bad, tuple(bad))


# ---------------------------------------------------------------------------
# links and differentials


def link_building(b: SphericalBuilding, p: SphPoint):
    """The 0-dimensional building of directions at a point of a 1-dim building.

    At a vertex the direction labels are the neighbor vertices; at an
    interior edge point they are the two edge endpoints."""
    if b.dimension != 1:
        raise SphericalInputError("links are defined for 1-dimensional buildings")
    if p.is_vertex():
        return points_building(adjacency(b)[p.vertex])
    return points_building(p.edge)


def initial_direction(b: SphericalBuilding, start: SphPoint, geod):
    """Direction label at `start` of a geodesic leaving it."""
    nxt = geod[1]
    e = _common_edge(b, start, nxt)
    if start.is_vertex():
        return e[1] if e[0] == start.vertex else e[0]
    # interior point: direction toward the endpoint we are moving to
    return e[0] if _edge_pos(nxt, e) < _edge_pos(start, e) else e[1]


def differential(f: BuildingMap, p: SphPoint) -> BuildingMap:
    """The induced surjective map between the 0-dim links at p and f(p)."""
    if not p.is_vertex():
        raise SphericalInputError("the differential is taken at a vertex")
    b1, b2 = f.source, f.target
    vm = f.mapping()
    y = vm[p.vertex]
    l1 = link_building(b1, p)
    l2 = link_building(b2, y)
    dmap = {}
    for u in l1.vertices:
        geod = the_geodesic(b2, y, vm[u])
        dmap[u] = vp(initial_direction(b2, y, geod))
    return building_map(l1, l2, dmap, validate=True)


# ---------------------------------------------------------------------------
# the lifting algorithm (apartments through convex sets)


class _Chooser:
    """Canonical-first tie-breaking, optionally randomized by a seed."""

    def __init__(self, seed=None):
        self._rng = None
        if seed is not None:
            import random

            self._rng = random.Random(seed)

    def pick(self, options):
        options = sorted(options)
        if not options:
            raise SphericalInputError("no candidate available")
        if self._rng is None:
            return options[0]
        return options[self._rng.randrange(len(options))]


def _vertex_preimages(f: BuildingMap, y: SphPoint):
    return tuple(sorted(v for v, img in f.vertex_map if img == y))


def _lift_dim0(f: BuildingMap, c1: SphConvexSet, a2: SphApartment, chooser) -> SphApartment:
    vm = f.mapping()
    y1, y2 = (vp(a2.cycle[0]), vp(a2.cycle[1]))
    got = {}
    for v in c1.vertices:
        img = vm[v]
        if img == y1:
            got.setdefault(0, v)
        elif img == y2:
            got.setdefault(1, v)
        else:
            raise SphericalInputError("image of the convex set leaves the apartment")
    picks = []
    for i, y in enumerate((y1, y2)):
        if i in got:
            picks.append(got[i])
        else:
            pre = _vertex_preimages(f, y)
            if not pre:
                raise SphericalInputError(f"no vertex preimage of {y}")
            picks.append(chooser.pick(pre))
    return make_apartment(f.source, picks)


def _suspension_pair_lift(f, p, pbar, required_dirs, a2, chooser) -> SphApartment:
    """Antipodal-pair case: lift through the differential at p."""
    b1 = f.source
    vm = f.mapping()
    y = vm[p]
    diff = differential(f, vp(p))
    target_dirs = apartment_directions_at(a2, y)
    link1 = diff.source
    link2 = diff.target
    a2_link = make_apartment(link2, target_dirs)
    c_link = make_convex_set(link1, vertices=required_dirs)
    k = _lift_dim0(diff, c_link, a2_link, chooser)
    paths = [geodesic_with_initial_edge(b1, p, pbar, d) for d in k.cycle]
    cycle = paths[0] + tuple(reversed(paths[1][1:-1]))
    a1 = make_apartment(b1, cycle)
    _assert_isometric_onto(f, a1, a2)
    return a1


def _assert_isometric_onto(f: BuildingMap, a1: SphApartment, a2: SphApartment):
    vm = f.mapping()
    b2 = f.target
    vs = a1.cycle
    for v in vs:
        if not point_on_apartment(a2, vm[v]):
            raise SphericalInputError("lifted apartment leaves the target apartment")
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            d1 = sph_distance(f.source, vp(vs[i]), vp(vs[j]))
            d2 = sph_distance(b2, vm[vs[i]], vm[vs[j]])
            if d1 != d2:
                raise SphericalInputError(
                    f"lift is not isometric on the pair ({vs[i]!r}, {vs[j]!r})"
                )


def _count_faces_meeting(a1: SphApartment, c1: SphConvexSet) -> int:
    """Open faces (vertices and open edges) of the apartment meeting C1."""
    n = len(set(a1.cycle) & set(c1.vertices))
    n += len(set(a1.edge_set()) & set(c1.edges))
    return n


def lift_apartment(f: BuildingMap, c1: SphConvexSet, a2: SphApartment,
                   seed=None) -> SphApartment:
    """Lift an apartment through a surjective 1-Lipschitz map.

    Given a convex spherical subcomplex C1 mapped isometrically into the
    apartment A2 of the target, produce an apartment A1 containing C1 that
    the map carries isometrically onto A2.
    """
    chooser = _Chooser(seed)
    b1 = f.source
    if c1.building != b1 or a2.building != f.target:
        raise SphericalInputError("map, convex set and apartment must agree")
    _check_lift_preconditions(f, c1, a2)
    if b1.dimension == 0:
        return _lift_dim0(f, c1, a2, chooser)

    dist = graph_distances(b1)

    def pick_antipodal_seed():
        # empty / singleton / antipodal-pair cases, reduced to a common form
        if len(c1.vertices) == 2 and not c1.edges:
            return c1.vertices[0], c1.vertices[1]
        if len(c1.vertices) == 1:
            p = c1.vertices[0]
            return p, _antipodal_partner(f, a2, p, chooser)
        # empty set: choose an antipodal vertex pair of A2 with vertex preimages
        n = len(a2.cycle)
        for i in range(n):
            y, ybar = vp(a2.cycle[i]), vp(a2.cycle[(i + n // 2) % n])
            pre1, pre2 = _vertex_preimages(f, y), _vertex_preimages(f, ybar)
            if pre1 and pre2:
                return chooser.pick(pre1), chooser.pick(pre2)
        raise SphericalInputError("no antipodal vertex pair of A2 admits vertex preimages")

    if len(c1.vertices) <= 2 and not c1.edges:
        if len(c1.vertices) == 2 and dist[c1.vertices[0]][c1.vertices[1]] < b1.m:
            raise SphericalInputError("two-point convex set must be antipodal")
        p, pbar = pick_antipodal_seed()
        a1 = _suspension_pair_lift(f, p, pbar, (), a2, chooser)
    else:
        # general case: start with an apartment through one point of C1,
        # then run the improvement step until no C1 face is missing.
        x = chooser.pick(c1.vertices)
        dirs_x = convex_set_directions_at(c1, x)
        a1 = _suspension_pair_lift(f, x, _antipodal_partner(f, a2, x, chooser),
                                   dirs_x, a2, chooser)
        guard = 0
        while True:
            missing = _missing_star_edge(a1, c1)
            if missing is None:
                break
            guard += 1
            if guard > 4 * b1.m + 4:
                raise SphericalInputError("improvement loop failed to terminate")
            p, _edge = missing
            before = _count_faces_meeting(a1, c1)
            pbar = apartment_antipode(a1, p)
            a_new = _suspension_pair_lift(
                f, p, pbar, convex_set_directions_at(c1, p), a2, chooser
            )
            after = _count_faces_meeting(a_new, c1)
            if after <= before:
                raise SphericalInputError("improvement step did not make progress")
            if not (set(a1.cycle) & set(c1.vertices) <= set(a_new.cycle)):
                raise SphericalInputError("improvement step lost part of C1")
            if not (set(a1.edge_set()) & set(c1.edges) <= set(a_new.edge_set())):
                raise SphericalInputError("improvement step lost an edge of C1")
            a1 = a_new
    for v in c1.vertices:
        if v not in a1.cycle:
            raise SphericalInputError("lifted apartment misses part of C1")
    for e in c1.edges:
        if e not in a1.edge_set():
            raise SphericalInputError("lifted apartment misses an edge of C1")
    return a1


def _missing_star_edge(a1: SphApartment, c1: SphConvexSet):
    """A (p, edge) with p in C1 and A1 and a C1-edge at p outside A1."""
    a_edges = set(a1.edge_set())
    a_verts = set(a1.cycle)
    for p in sorted(set(c1.vertices) & a_verts):
        for e in c1.edges:
            if p in e and e not in a_edges:
                return p, e
    return None


def _antipodal_partner(f: BuildingMap, a2: SphApartment, p, chooser):
    """A vertex opposite to p whose image is the A2-antipode of f(p)."""
    ybar = apartment_point_antipode(a2, f.mapping()[p])
    cands = [v for v, img in f.vertex_map if img == ybar and v != p]
    if not cands:
        raise SphericalInputError("no vertex preimage of the antipode of f(p)")
    return chooser.pick(cands)


def _check_lift_preconditions(f: BuildingMap, c1: SphConvexSet, a2: SphApartment):
    vm = f.mapping()
    for v in c1.vertices:
        if not point_on_apartment(a2, vm[v]):
            raise SphericalInputError("f(C1) is not contained in A2")
    vs = c1.vertices
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            d1 = sph_distance(f.source, vp(vs[i]), vp(vs[j]))
            d2 = sph_distance(f.target, vm[vs[i]], vm[vs[j]])
            if d1 != d2:
                raise SphericalInputError("f is not isometric on C1")


# ---------------------------------------------------------------------------
# suspension log map and the containment theorem


def suspension_log_map(b: SphericalBuilding, x) -> BuildingMap:
    """The surjective 1-Lipschitz map from a 1-dim building to the
    suspension of the link at the vertex x (a generalized 2-gon)."""
    if b.dimension != 1 or x not in b.vertices:
        raise SphericalInputError("suspension base must be a vertex of a 1-dim building")
    adj = adjacency(b)
    poles = (("pole", 0), ("pole", 1))
    dirs = tuple(("dir", u) for u in adj[x])
    target = complete_bipartite_building(poles, dirs)
    dist = graph_distances(b)
    m = b.m
    vm = {}
    for v in b.vertices:
        k = dist[x][v]
        if k == 0:
            vm[v] = vp(poles[0])
            continue
        if k == m:
            vm[v] = vp(poles[1])
            continue
        geods = vertex_geodesics(b, x, v)
        if len(geods) != 1:
            raise SphericalInputError("geodesic from the base not unique below pi")
        d = ("dir", geods[0][1])
        r = Q(k, m)  # distance from the north pole, units of pi
        if r < Q(1, 2):
            vm[v] = ep(poles[0], d, 2 * r)
        elif r == Q(1, 2):
            vm[v] = vp(d)
        else:
            vm[v] = ep(d, poles[1], 2 * r - 1)
    return building_map(b, target, vm, validate=True)


def suspension_apartment(f: BuildingMap, dir_pair) -> SphApartment:
    """The 4-cycle of the suspension target through two link directions."""
    d1, d2 = sorted(dir_pair)
    return make_apartment(f.target, (("pole", 0), ("dir", d1), ("pole", 1), ("dir", d2)))


def sph_apartment_containing(b: SphericalBuilding, c: SphConvexSet,
                             prescribed=None, seed=None) -> SphApartment:
    """An apartment containing a convex spherical subcomplex.

    With `prescribed=(x, link_pair)` the returned apartment is additionally
    required to have exactly the two given directions at the vertex x.
    """
    chooser = _Chooser(seed)
    if c.building != b:
        raise SphericalInputError("convex set does not live in the given building")
    if b.dimension == 0:
        if len(c.vertices) == 2:
            return make_apartment(b, c.vertices)
        have = list(c.vertices)
        rest = [v for v in b.vertices if v not in have]
        while len(have) < 2:
            have.append(chooser.pick(rest))
            rest.remove(have[-1])
        return make_apartment(b, have)

    if prescribed is not None:
        x, a_x = prescribed
        if x.is_vertex():
            x = x.vertex
        if x not in c.vertices:
            raise SphericalInputError("prescribed base point must lie in C")
        a_x = tuple(sorted(a_x))
        if not set(convex_set_directions_at(c, x)) <= set(a_x):
            raise SphericalInputError("prescribed link apartment does not contain T_x C")
    else:
        if c.is_empty():
            x = chooser.pick(b.vertices)
        else:
            x = chooser.pick(c.vertices)
        dirs = list(convex_set_directions_at(c, x))
        rest = [u for u in adjacency(b)[x] if u not in dirs]
        while len(dirs) < 2:
            dirs.append(chooser.pick(rest))
            rest.remove(dirs[-1])
        a_x = tuple(sorted(dirs[:2]))

    f = suspension_log_map(b, x)
    a2 = suspension_apartment(f, a_x)
    a1 = lift_apartment(f, c, a2, seed=seed)
    if tuple(sorted(apartment_directions_at(a1, vp(x)))) != a_x:
        raise SphericalInputError("lift failed to realize the prescribed link apartment")
    return a1
