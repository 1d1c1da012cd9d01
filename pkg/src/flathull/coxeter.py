"""Exact arithmetic for the finite and affine Weyl groups used by the models.

Supported types: A1, A1xA1, A2 and their affine versions.  All coordinates
are integers or Fractions; no floating point enters this module.

Conventions for the rank-2 triangular chart (types A2 / affA2):
  * vertices live on Z^2 with Gram matrix [[1,-1/2],[-1/2,1]], so the
    squared length of (u, v) is u^2 - u*v + v^2 and all six unit
    directions (1,0), (1,1), (0,1) and their negatives have length 1;
  * the six root covectors are +-(1,0), +-(0,1), +-(1,-1), acting on
    points by the ordinary integer dot product;
  * the vertex type of (u, v) is (u + v) mod 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction

TYPE_TAGS = ("A1", "A1xA1", "A2", "affA1", "affA2")
FINITE_TAGS = ("A1", "A1xA1", "A2")

COXETER_MATRICES = {
    "A1": ((1,),),
    "A1xA1": ((1, 2), (2, 1)),
    "A2": ((1, 3), (3, 1)),
    "affA1": ((1, 0), (0, 1)),  # m = infinity encoded as 0
    "affA2": ((1, 3, 3), (3, 1, 3), (3, 3, 1)),
}


class UnsupportedEnumerationError(ValueError):
    """Raised when asked to enumerate an infinite (affine) Weyl group."""


@dataclass(frozen=True)
class CoxeterSystem:
    type_tag: str
    rank: int
    coxeter_matrix: tuple

    def __post_init__(self):
        if self.type_tag not in TYPE_TAGS:
            raise ValueError(f"unknown type tag {self.type_tag!r}")
        m = self.coxeter_matrix
        if len(m) != len(m[0]):
            raise ValueError("coxeter matrix must be square")
        for i in range(len(m)):
            if m[i][i] != 1:
                raise ValueError("coxeter matrix diagonal must be 1")
            for j in range(len(m)):
                if m[i][j] != m[j][i]:
                    raise ValueError("coxeter matrix must be symmetric")
                if i != j and m[i][j] != 0 and m[i][j] < 2:
                    raise ValueError("off-diagonal entries must be >= 2")
        if m != COXETER_MATRICES[self.type_tag]:
            raise ValueError("coxeter matrix does not match the type tag")

    @property
    def is_finite(self) -> bool:
        return self.type_tag in FINITE_TAGS


def coxeter_system(type_tag: str) -> CoxeterSystem:
    m = COXETER_MATRICES[type_tag]
    rank = {"A1": 1, "A1xA1": 2, "A2": 2, "affA1": 2, "affA2": 3}[type_tag]
    return CoxeterSystem(type_tag, rank, m)


@dataclass(frozen=True)
class Chart:
    """Exact coordinate chart for an apartment (Z^k with a Gram form)."""

    dimension: int
    gram: tuple  # tuple of tuples of Fractions, positive definite

    def __post_init__(self):
        g = self.gram
        if len(g) != self.dimension or any(len(r) != self.dimension for r in g):
            raise ValueError("gram matrix shape mismatch")
        if g[0][0] <= 0:
            raise ValueError("gram not positive definite")
        if self.dimension == 2:
            det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
            if det <= 0 or g[0][1] != g[1][0]:
                raise ValueError("gram not symmetric positive definite")
        # cached dispatch flags for the two standard charts (hot path)
        object.__setattr__(self, "_fast_line",
                           self.dimension == 1 and g[0][0] == 1)
        object.__setattr__(self, "_fast_triangular",
                           self.dimension == 2 and g == _TRIANGULAR_GRAM)

    def inner(self, a: Sequence, b: Sequence) -> Q:
        if self._fast_line:
            return a[0] * b[0]
        if self._fast_triangular:
            mixed = a[0] * b[1] + a[1] * b[0]
            base = a[0] * b[0] + a[1] * b[1]
            if isinstance(mixed, int) and mixed % 2 == 0:
                return base - mixed // 2
            return base - Q(mixed, 2)
        g = self.gram
        return sum(
            Q(a[i]) * g[i][j] * Q(b[j])
            for i in range(self.dimension)
            for j in range(self.dimension)
        )

    def sq_norm(self, a: Sequence) -> Q:
        if self._fast_line:
            return a[0] * a[0]
        if self._fast_triangular:
            return a[0] * a[0] - a[0] * a[1] + a[1] * a[1]
        return self.inner(a, a)

    def sq_dist(self, a: Sequence, b: Sequence) -> Q:
        if self._fast_line:
            d = a[0] - b[0]
            return d * d
        if self._fast_triangular:
            du, dv = a[0] - b[0], a[1] - b[1]
            return du * du - du * dv + dv * dv
        d = tuple(Q(x) - Q(y) for x, y in zip(a, b))
        return self.sq_norm(d)


_TRIANGULAR_GRAM = ((Q(1), Q(-1, 2)), (Q(-1, 2), Q(1)))


def tree_chart() -> Chart:
    """The Z chart of a tree apartment (line), unit edges."""
    return Chart(1, ((Q(1),),))


def triangular_chart() -> Chart:
    """The Z^2 chart of an affA2 apartment, unit edges."""
    return Chart(2, ((Q(1), Q(-1, 2)), (Q(-1, 2), Q(1))))


# Cyclically ordered unit directions of the triangular chart.
HEX_DIRECTIONS = ((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1))

A2_ROOTS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))
A1_ROOTS = ((1,), (-1,))
A1XA1_ROOTS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def vertex_type(p: Sequence[int]) -> int:
    """Type in Z/3 of a triangular-chart vertex."""
    return (p[0] + p[1]) % 3


def graph_dist(a: Sequence[int], b: Sequence[int] = None) -> int:
    """Edge-path distance between chart vertices (default: from the origin).

    Rank 1: |u|.  Rank 2 (triangular lattice with generators the six unit
    directions): max(|u|,|v|) when u*v >= 0 else |u|+|v|.
    """
    if b is None:
        b = (0,) * len(a)
    if len(a) == 1:
        return abs(a[0] - b[0])
    u, v = a[0] - b[0], a[1] - b[1]
    if u * v >= 0:
        return max(abs(u), abs(v))
    return abs(u) + abs(v)


def chart_ball(radius: int, dimension: int) -> list:
    """All chart vertices at graph distance <= radius from the origin."""
    if dimension == 1:
        return [(u,) for u in range(-radius, radius + 1)]
    out = []
    for u in range(-radius, radius + 1):
        for v in range(-radius, radius + 1):
            if graph_dist((u, v), (0, 0)) <= radius:
                out.append((u, v))
    return sorted(out)


def chart_chambers_at(p, dimension: int):
    """Chambers (top cells) of the chart containing vertex p."""
    if dimension == 1:
        (u,) = p
        return [((u - 1,), (u,)), ((u,), (u + 1,))]
    u, v = p
    out = set()
    # "up" chambers {z, z+e1, z+e1+e2}, "down" chambers {z, z+e2, z+e1+e2}.
    for du in (0, -1):
        for dv in (0, -1):
            z = (u + du, v + dv)
            up = (z, (z[0] + 1, z[1]), (z[0] + 1, z[1] + 1))
            if p in up:
                out.add(tuple(sorted(up)))
            dn = (z, (z[0], z[1] + 1), (z[0] + 1, z[1] + 1))
            if p in dn:
                out.add(tuple(sorted(dn)))
    return sorted(out)


def is_chart_chamber(cell, dimension: int) -> bool:
    cell = tuple(sorted(cell))
    if dimension == 1:
        return len(cell) == 2 and cell[1][0] - cell[0][0] == 1
    if len(cell) != 3:
        return False
    return cell in chart_chambers_at(cell[0], 2) or cell in chart_chambers_at(cell[1], 2)


def _mat_apply(m, p):
    return tuple(sum(m[i][j] * p[j] for j in range(len(p))) for i in range(len(m)))


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def point_isometries(dimension: int):
    """Origin-fixing chart isometries (matrices) as integer matrix tuples.

    Rank 1: {+1, -1}.  Rank 2 triangular chart: the dihedral group of
    order 12 generated by the rotation e1 -> e1+e2 -> e2 -> ... and the
    swap (u,v) -> (v,u).
    """
    if dimension == 1:
        return [((1,),), ((-1,),)]
    rot = ((1, -1), (1, 0))
    swp = ((0, 1), (1, 0))
    ident = ((1, 0), (0, 1))
    out = []
    m = ident
    for _ in range(6):
        out.append(m)
        out.append(_mat_mul(m, swp))
        m = _mat_mul(rot, m)
    return out


def apply_isometry(matrix, translation, p):
    q = _mat_apply(matrix, p)
    return tuple(q[i] + translation[i] for i in range(len(p)))


@dataclass(frozen=True)
class Halfspace:
    """Closed halfspace {p : <normal, p> >= offset} in a chart."""

    normal: tuple
    offset: Q

    def __post_init__(self):
        if all(c == 0 for c in self.normal):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "offset", Q(self.offset))

    def eval(self, p: Sequence) -> Q:
        if len(p) != len(self.normal):
            raise ValueError("dimension mismatch between halfspace and point")
        return sum(Q(n) * Q(x) for n, x in zip(self.normal, p))


def halfspace_contains(h: Halfspace, p: Sequence) -> bool:
    return h.eval(p) >= h.offset


@dataclass(frozen=True)
class RootDirectionSet:
    covectors: tuple

    def __post_init__(self):
        cs = self.covectors
        for c in cs:
            if _primitive(c) != c:
                raise ValueError("root covectors must be primitive")
            if tuple(-x for x in c) not in cs:
                raise ValueError("root directions must be closed under negation")
        signless = {_primitive_signless(c) for c in cs}
        if 2 * len(signless) != len(cs):
            raise ValueError("root directions must be pairwise non-proportional up to sign")

    def contains_direction(self, covector) -> bool:
        """True iff covector is a positive multiple of a member."""
        p = _primitive(covector)
        return p in self.covectors


def _primitive(c):
    from math import gcd

    g = 0
    for x in c:
        g = gcd(g, abs(int(x)))
    if g == 0:
        raise ValueError("zero covector")
    return tuple(int(x) // g for x in c)


def _primitive_signless(c):
    p = _primitive(c)
    return min(p, tuple(-x for x in p))


# Reflection matrices for the finite chart actions.
_GENERATORS = {
    "A1": [((-1,),)],
    "A1xA1": [((-1, 0), (0, 1)), ((1, 0), (0, -1))],
    # Reflections across the walls {u = 0} and {v = u} of the triangular chart.
    "A2": [((-1, 0), (-1, 1)), ((0, 1), (1, 0))],
}


def weyl_elements(system: CoxeterSystem):
    """All elements of a finite Weyl group as canonical reduced words.

    Words are tuples of generator indices; the identity () comes first and
    the list is in shortlex order.  Raises UnsupportedEnumerationError for
    affine types.
    """
    if not system.is_finite:
        raise UnsupportedEnumerationError(
            f"cannot enumerate the infinite Weyl group of type {system.type_tag}"
        )
    gens = _GENERATORS[system.type_tag]
    dim = len(gens[0])
    ident = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
    canon = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            w = canon[m]
            for i, g in enumerate(gens):
                m2 = _mat_mul(g, m)
                if m2 not in canon:
                    canon[m2] = w + (i,)
                    nxt.append(m2)
        frontier = nxt
    words = sorted(canon.values(), key=lambda w: (len(w), w))
    return words


def weyl_matrix(system: CoxeterSystem, word) -> tuple:
    gens = _GENERATORS[system.type_tag]
    dim = len(gens[0])
    m = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
    for i in word:
        m = _mat_mul(gens[i], m)
    return m


def chamber_fan(system: CoxeterSystem):
    """Root covectors and the fundamental Weyl chamber of the chart.

    Affine types reuse the covectors of their finite part; affine walls are
    the translates {<root, p> = integer offset} of the linear ones.
    """
    tag = system.type_tag
    if tag in ("A1", "affA1"):
        roots = RootDirectionSet(A1_ROOTS)
        fund = [Halfspace((1,), Q(0))]
    elif tag == "A1xA1":
        roots = RootDirectionSet(A1XA1_ROOTS)
        fund = [Halfspace((1, 0), Q(0)), Halfspace((0, 1), Q(0))]
    elif tag in ("A2", "affA2"):
        roots = RootDirectionSet(A2_ROOTS)
        # Simple pair at angle 2*pi/3: u >= 0 and v >= u.
        fund = [Halfspace((1, 0), Q(0)), Halfspace((-1, 1), Q(0))]
    else:  # pragma: no cover
        raise ValueError(tag)
    return roots, fund


def root_direction_set(type_tag: str) -> RootDirectionSet:
    return chamber_fan(coxeter_system(type_tag))[0]
