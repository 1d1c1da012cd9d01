"""Exact arithmetic over F_q[t] for prime q, plus 3x3 lattice normal forms.

Polynomials are tuples of coefficients in ascending degree order with no
trailing zeros, entries reduced mod q.  The zero polynomial is ().

Rank-3 lattices over the valuation ring F_q[[t]] are represented by 3x3
polynomial matrices (column span); `hermite_form` produces the unique
upper-triangular canonical representative with t-power diagonal and reduced
off-diagonal entries, which makes lattice (and lattice-class) equality a
tuple comparison.
"""

from __future__ import annotations

import functools
from typing import Optional, Sequence

# ---------------------------------------------------------------------------
# polynomials


def poly(coeffs: Sequence[int], q: int) -> tuple:
    out = [c % q for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


ZERO = ()
ONE = (1,)


def t_power(k: int) -> tuple:
    return (0,) * k + (1,)


def padd(a, b, q):
    n = max(len(a), len(b))
    return poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                 for i in range(n)], q)


def pneg(a, q):
    return poly([-c for c in a], q)


def psub(a, b, q):
    return padd(a, pneg(b, q), q)


def pmul(a, b, q):
    if not a or not b:
        return ZERO
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return poly(out, q)


def pscale(a, c, q):
    return poly([c * x for x in a], q)


def pval(a) -> Optional[int]:
    """t-adic valuation; None for the zero polynomial."""
    for i, c in enumerate(a):
        if c:
            return i
    return None


def pshift(a, k: int) -> tuple:
    """Multiply by t^k (k may be negative if the valuation allows)."""
    if not a:
        return ZERO
    if k >= 0:
        return (0,) * k + tuple(a)
    v = pval(a)
    if v is None or v + k < 0:
        raise ValueError("negative shift below the valuation")
    return tuple(a[-k:])


def pmod_tk(a, k: int) -> tuple:
    out = list(a[:k])
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _inv_mod_q(c, q):
    return pow(c, q - 2, q) if c % q else None


def punit_inv(a, k: int, q) -> tuple:
    """Inverse mod t^k of a unit (nonzero constant term)."""
    if not a or a[0] % q == 0:
        raise ValueError("not a unit in F_q[[t]]")
    inv0 = _inv_mod_q(a[0], q)
    out = [inv0] + [0] * (k - 1)
    for i in range(1, k):
        s = sum(a[j] * out[i - j] for j in range(1, min(i, len(a) - 1) + 1)
                if j < len(a))
        out[i] = (-inv0 * s) % q
    return poly(out, q)


# ---------------------------------------------------------------------------
# matrices (tuples of rows of polynomials)


def mat(rows, q):
    return tuple(tuple(poly(e, q) if not isinstance(e, tuple) else poly(e, q)
                       for e in row) for row in rows)


def identity_matrix(n=3) -> tuple:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def scalar_matrix(p, n=3) -> tuple:
    return tuple(tuple(p if i == j else ZERO for j in range(n)) for i in range(n))


def mat_mul(a, b, q):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(tuple(
        _psum([pmul(a[i][l], b[l][j], q) for l in range(k)], q)
        for j in range(m)) for i in range(n))


def _psum(ps, q):
    out = ZERO
    for p in ps:
        out = padd(out, p, q)
    return out


def det3(m, q):
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    return psub(
        padd(padd(pmul(a, psub(pmul(e, i, q), pmul(f, h, q), q), q),
                  pmul(c, psub(pmul(d, h, q), pmul(e, g, q), q), q), q),
             ZERO, q),
        pmul(b, psub(pmul(d, i, q), pmul(f, g, q), q), q), q)


def adjugate3(m, q):
    def co(r1, r2, c1, c2):
        return psub(pmul(m[r1][c1], m[r2][c2], q), pmul(m[r1][c2], m[r2][c1], q), q)

    return (
        (co(1, 2, 1, 2), pneg(co(0, 2, 1, 2), q), co(0, 1, 1, 2)),
        (pneg(co(1, 2, 0, 2), q), co(0, 2, 0, 2), pneg(co(0, 1, 0, 2), q)),
        (co(1, 2, 0, 1), pneg(co(0, 2, 0, 1), q), co(0, 1, 0, 1)),
    )


def minors2(m, q):
    """All nine 2x2 minors of a 3x3 matrix."""
    out = []
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            for c1 in range(3):
                for c2 in range(c1 + 1, 3):
                    out.append(psub(pmul(m[r1][c1], m[r2][c2], q),
                                    pmul(m[r1][c2], m[r2][c1], q), q))
    return out


def min_val(polys) -> Optional[int]:
    vals = [v for v in (pval(p) for p in polys) if v is not None]
    return min(vals) if vals else None


# ---------------------------------------------------------------------------
# Hermite normal form over the valuation ring


class SingularLatticeError(ValueError):
    """The given columns do not span a full-rank lattice."""


def hermite_form(columns, q: int, precision: int) -> tuple:
    """Canonical generator matrix of the column span over F_q[[t]].

    Accepts any list of >= 3 polynomial column 3-vectors of full rank and
    returns the unique upper-triangular matrix [[t^a, f, g], [0, t^b, h],
    [0, 0, t^c]] with deg f, deg g < a and deg h < b spanning the same
    F_q[[t]]-module.  All work happens mod t^precision, which is exact as
    long as the determinant valuation stays below the precision.
    """
    cols = [list(pmod_tk(e, precision) for e in col) for col in columns]

    def val_at(col, row):
        return pval(col[row])

    fixed = []  # columns already pivoted, from the bottom row up
    for row in (2, 1, 0):
        pivot_idx = None
        pivot_val = None
        for i, col in enumerate(cols):
            v = val_at(col, row)
            if v is not None and (pivot_val is None or v < pivot_val):
                pivot_val, pivot_idx = v, i
        if pivot_idx is None:
            raise SingularLatticeError("columns are not of full rank")
        pivot = cols.pop(pivot_idx)
        # normalize the pivot entry to an exact power of t
        unit = pshift(pivot[row], -pivot_val)
        uinv = punit_inv(unit, precision, q)
        pivot = [pmod_tk(pmul(e, uinv, q), precision) for e in pivot]
        # clear this row in all remaining columns
        for col in cols:
            v = val_at(col, row)
            while v is not None:
                factor = pshift(col[row], -pivot_val)
                for r in range(3):
                    col[r] = pmod_tk(
                        psub(col[r], pmul(factor, pivot[r], q), q), precision)
                v = val_at(col, row)
        fixed.append(pivot)
    c3, c2, c1 = fixed  # pivot columns for rows 2, 1, 0
    m = [[c1[i], c2[i], c3[i]] for i in range(3)]
    a = pval(m[0][0])
    b = pval(m[1][1])
    # reduce entry (1,2) mod t^b with a column operation (col3 -= u * col2),
    # which also adjusts row 0 and keeps the column span intact
    e = m[1][2]
    u = pshift(psub(e, pmod_tk(e, b), q), -b)
    if u:
        for r in range(3):
            m[r][2] = psub(m[r][2], pmul(u, m[r][1], q), q)
    # column 1 is (t^a, 0, 0): reducing row 0 mod t^a touches nothing else
    m[0][1] = pmod_tk(m[0][1], a)
    m[0][2] = pmod_tk(m[0][2], a)
    return tuple(tuple(row) for row in m)


def diagonal_valuations(hnf) -> tuple:
    return (pval(hnf[0][0]), pval(hnf[1][1]), pval(hnf[2][2]))


def primitive_class(hnf, q: int, precision: int) -> tuple:
    """Scale a lattice by t-powers until it is in O^3 but not t*O^3."""
    m = hnf
    while True:
        vals = [pval(e) for row in m for e in row if e]
        shift = min(vals)
        if shift == 0:
            return m
        cols = [[pshift(m[i][j], -shift) for i in range(3)] for j in range(3)]
        m = hermite_form(cols, q, precision)


def _bits(p) -> int:
    """Pack a polynomial over F_2 into an integer bitmask (bit i = coeff of t^i)."""
    n = 0
    for i, c in enumerate(p):
        if c:
            n |= 1 << i
    return n


def _clmul(a: int, b: int) -> int:
    """Carryless product of two F_2[t] polynomials packed as bitmasks."""
    r = 0
    while b:
        low = b & -b
        r ^= a << (low.bit_length() - 1)
        b ^= low
    return r


@functools.lru_cache(maxsize=None)
def _packed_mod2(m) -> tuple:
    return tuple(tuple(_bits(e) for e in row) for row in m)


@functools.lru_cache(maxsize=None)
def _adjugate_mod2(u_hnf) -> tuple:
    um = _packed_mod2(u_hnf)
    # adj(U)[i][j] = cofactor C[j][i]; signs vanish mod 2.
    return tuple(tuple(
        _clmul(um[(j + 1) % 3][(i + 1) % 3], um[(j + 2) % 3][(i + 2) % 3])
        ^ _clmul(um[(j + 1) % 3][(i + 2) % 3], um[(j + 2) % 3][(i + 1) % 3])
        for j in range(3)) for i in range(3))


def _divisors_mod2(u_hnf, v_hnf) -> tuple:
    """(d1, d12, d123) valuations for a lattice pair over F_2((t)).

    Same quantities as the generic path in elementary_divisor_pair, but
    with polynomials packed into integers so products are carryless
    multiplies.  Returns None components for vanishing minors.
    """
    vm = _packed_mod2(v_hnf)
    adj = _adjugate_mod2(u_hnf)
    b = [[_clmul(adj[i][0], vm[0][j]) ^ _clmul(adj[i][1], vm[1][j])
          ^ _clmul(adj[i][2], vm[2][j]) for j in range(3)] for i in range(3)]
    entries = [e for row in b for e in row]
    minors = []
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            for c1 in range(3):
                for c2 in range(c1 + 1, 3):
                    minors.append(_clmul(b[r1][c1], b[r2][c2])
                                  ^ _clmul(b[r1][c2], b[r2][c1]))
    det = (_clmul(b[0][0], minors[8]) ^ _clmul(b[0][1], minors[7])
           ^ _clmul(b[0][2], minors[6]))

    def vmin(ints):
        vals = [(x & -x).bit_length() - 1 for x in ints if x]
        return min(vals) if vals else None

    d1 = vmin(entries)
    d12 = vmin(minors)
    d123 = (det & -det).bit_length() - 1 if det else None
    return d1, d12, d123


def elementary_divisor_pair(u_hnf, v_hnf, q: int) -> tuple:
    """Relative position (a, b), a >= b >= 0, of two lattice classes.

    These are the normalized valuations of the invariant factors of the
    base-change matrix U^{-1} V, computed exactly from adj(U)*V: the three
    divisor valuations are (min entry val, min 2x2 minor val minus that,
    det val minus the first two).
    """
    if q == 2:
        d1, d12, d123 = _divisors_mod2(u_hnf, v_hnf)
        if d1 is None or d12 is None or d123 is None:
            raise SingularLatticeError("degenerate lattice pair")
        divs = sorted((d1, d12 - d1, d123 - d12))
        lo = divs[0]
        return (divs[2] - lo, divs[1] - lo)
    b = mat_mul(adjugate3(u_hnf, q), v_hnf, q)
    d1 = min_val([e for row in b for e in row])
    d12 = min_val(minors2(b, q))
    d123 = pval(det3(b, q))
    if d1 is None or d12 is None or d123 is None:
        raise SingularLatticeError("degenerate lattice pair")
    divs = sorted((d1, d12 - d1, d123 - d12))
    lo = divs[0]
    return (divs[2] - lo, divs[1] - lo)
