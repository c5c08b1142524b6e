"""Exact arithmetic of ternary conics over Q.

A fibre of the bundle is a smooth plane conic x^T M x = 0 with integer
Gram matrix M.  This module decides solubility (Hilbert symbols on a
reduced diagonal model), finds a rational point inside the Holzer bounds,
builds a proper parametrization P^1 -> C, and counts points in height
boxes by two independent strategies that are cross checked in the tests:

* box: sweep the two smallest box dimensions and solve a quadratic for
  the last coordinate,
* parametrized: pull the box back through the parametrization, where a
  certified content bound turns the box into a finite (u, v) region.

Counts are exact integers throughout; floats only ever enter as seeds
that are corrected by integer arithmetic afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import (
    divisor_count,
    extgcd,
    factorize,
    is_prime,
    prime_divisors,
    squarefree_part,
)
from .bundle import fibre_class
from .errors import EngineError, InvalidInputError
from .heights import HeightModel, fibre_box
from .projective import canonicalize

try:
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None

INF = math.inf

# int64 safety margin for the vectorised scans
_I64 = 1 << 62

_STRATEGIES = ("auto", "box", "parametrized", "both")


class TernaryForm:
    """Integer symmetric 3x3 Gram matrix with nonzero determinant."""

    __slots__ = ("matrix", "_det", "_minors_gcd", "_reduced")

    def __init__(self, matrix: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(v) for v in row) for row in matrix)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise InvalidInputError("a ternary form needs a 3x3 matrix")
        for i in range(3):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise InvalidInputError("Gram matrix must be symmetric")
        self.matrix = rows
        self._det = _det3(rows)
        if self._det == 0:
            raise InvalidInputError("degenerate conic: det = 0")
        self._minors_gcd = None
        self._reduced = None

    @property
    def det(self) -> int:
        return self._det

    @property
    def minors_gcd(self) -> int:
        """gcd of the nine 2x2 minors (the codim-2 discriminant scale)."""
        if self._minors_gcd is None:
            m = self.matrix
            g = 0
            for i in range(3):
                for j in range(3):
                    r = [k for k in range(3) if k != i]
                    c = [k for k in range(3) if k != j]
                    minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
                    g = math.gcd(g, minor)
            self._minors_gcd = g
        return self._minors_gcd

    def evaluate(self, x: Sequence[int]) -> int:
        m = self.matrix
        return sum(m[i][j] * x[i] * x[j] for i in range(3) for j in range(3))

    def reduced(self) -> tuple[tuple[int, int, int], tuple]:
        """Diagonal model (m0, m1, m2) squarefree and pairwise coprime.

        Returns (m, back) where back is a rational 3x3 matrix sending
        solutions of  m0 w0^2 + m1 w1^2 + m2 w2^2 = 0  to solutions of
        the original form.
        """
        if self._reduced is None:
            self._reduced = _legendre_reduce(self.matrix)
        return self._reduced

    def __eq__(self, other):
        return isinstance(other, TernaryForm) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"TernaryForm({self.matrix})"


def _det3(m) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _as_form(form) -> TernaryForm:
    if isinstance(form, TernaryForm):
        return form
    return TernaryForm(form)


# ---------------------------------------------------------------------------
# diagonalization and Legendre reduction


def _diagonalize(matrix) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Rational congruence U with U^T M U diagonal; returns (U, diag)."""
    m = [[Fraction(matrix[i][j]) for j in range(3)] for i in range(3)]
    u = [[Fraction(i == j) for j in range(3)] for i in range(3)]

    def addcol(l, k, f):
        # col_l += f * col_k, mirrored on rows to stay congruent
        for i in range(3):
            m[i][l] += f * m[i][k]
        for j in range(3):
            m[l][j] += f * m[k][j]
        for i in range(3):
            u[i][l] += f * u[i][k]

    def swapcols(k, l):
        for i in range(3):
            m[i][k], m[i][l] = m[i][l], m[i][k]
        m[k], m[l] = m[l], m[k]
        for i in range(3):
            u[i][k], u[i][l] = u[i][l], u[i][k]

    for k in range(3):
        if m[k][k] == 0:
            pivot = next((l for l in range(k, 3) if m[l][l] != 0), None)
            if pivot is None:
                # zero diagonal block: pull a cross term onto the diagonal
                pair = next(
                    ((l, t) for l in range(k, 3) for t in range(l + 1, 3) if m[l][t] != 0),
                    None,
                )
                if pair is None:
                    raise EngineError("diagonalization hit a zero block on a nonsingular form")
                addcol(pair[0], pair[1], Fraction(1))
                pivot = pair[0]
            if pivot != k:
                swapcols(k, pivot)
        for l in range(k + 1, 3):
            if m[k][l] != 0:
                addcol(l, k, -m[k][l] / m[k][k])
    return u, [m[i][i] for i in range(3)]


def _legendre_reduce(matrix) -> tuple[tuple[int, int, int], tuple]:
    """Squarefree pairwise coprime diagonal model plus the back transform."""
    u, diag = _diagonalize(matrix)
    coeffs = []
    for i in range(3):
        d = diag[i]
        if d == 0:
            raise EngineError("zero diagonal entry on a nonsingular form")
        # d = m * r^2 with m squarefree; absorb r into the basis column
        prod = d.numerator * d.denominator
        m_i = squarefree_part(prod)
        k = math.isqrt(prod // m_i)
        scale = Fraction(d.denominator, k)
        for r in range(3):
            u[r][i] *= scale
        coeffs.append(m_i)

    # from here on back^T M back = lam * diag(coeffs): rescaling the
    # equation keeps the zero set but not the strict congruence
    lam = Fraction(1)
    g = math.gcd(*coeffs)
    if g > 1:
        coeffs = [c // g for c in coeffs]
        lam *= g

    # pairwise coprime: if p | m_i, m_j then w_k = p w_k' divides p out
    changed = True
    while changed:
        changed = False
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            g = math.gcd(coeffs[i], coeffs[j])
            if g > 1:
                p = min(factorize(g))
                coeffs[i] //= p
                coeffs[j] //= p
                coeffs[k] *= p
                for r in range(3):
                    u[r][k] *= p
                lam *= p
                changed = True
                break

    out = tuple(coeffs)
    back = tuple(tuple(u[i][j] for j in range(3)) for i in range(3))
    _check_reduction(matrix, out, back, lam)
    return out, back


def _check_reduction(matrix, coeffs, back, lam):
    # exact sanity: back^T M back must equal lam * diag(coeffs)
    for i in range(3):
        for j in range(3):
            acc = Fraction(0)
            for r in range(3):
                for s in range(3):
                    acc += back[r][i] * matrix[r][s] * back[s][j]
            want = lam * coeffs[i] if i == j else 0
            if acc != want:
                raise EngineError("diagonal reduction failed its own check")


# ---------------------------------------------------------------------------
# Hilbert symbols and solubility


def _two_unit_eps(u: int) -> int:
    return ((u - 1) // 2) % 2


def _two_unit_omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def _legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else 1


def hilbert_symbol(a: int, b: int, place) -> int:
    """Hilbert symbol (a, b) at a finite prime or at place=math.inf.

    +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over the local
    field.  Formulas split by the parity of the valuations, with the
    unit characters mod 8 doing the work at p = 2.
    """
    if a == 0 or b == 0:
        raise InvalidInputError("hilbert symbol needs nonzero arguments")
    if place == INF or place == "inf":
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    if not is_prime(p):
        raise InvalidInputError(f"{place} is not a prime or 'inf'")
    alpha, u = 0, a
    while u % p == 0:
        u //= p
        alpha += 1
    beta, v = 0, b
    while v % p == 0:
        v //= p
        beta += 1
    if p == 2:
        e = _two_unit_eps(u) * _two_unit_eps(v)
        e += alpha * _two_unit_omega(v) + beta * _two_unit_omega(u)
        return -1 if e % 2 else 1
    e = 0
    if alpha % 2 and beta % 2 and (p - 1) // 2 % 2:
        e = 1
    s = (-1) ** e
    if beta % 2:
        s *= _legendre(u, p)
    if alpha % 2:
        s *= _legendre(v, p)
    return s


def local_solubility(form, place) -> bool:
    """Does the conic have a point over Q_p (or over R for place=inf)?"""
    form = _as_form(form)
    (m0, m1, m2), _ = form.reduced()
    return hilbert_symbol(-m0 * m2, -m1 * m2, place) == 1


def insoluble_places(form) -> tuple:
    """Places (inf and primes dividing 2 det) where the conic fails locally.

    Empty tuple iff the conic has rational points: an odd prime outside
    the reduced coefficients cannot obstruct, and every reduced prime
    divides the determinant.
    """
    form = _as_form(form)
    bad = []
    if not local_solubility(form, INF):
        bad.append(INF)
    for p in prime_divisors(2 * form.det):
        if not local_solubility(form, p):
            bad.append(p)
    return tuple(bad)


def is_soluble(form) -> bool:
    return not insoluble_places(form)


# ---------------------------------------------------------------------------
# rational points

_SEARCH_CAP = 10**9


def find_point(form):
    """A primitive rational point on the conic, or None if there is none.

    On the reduced model a x^2 + b y^2 + c z^2 = 0 a solution exists with
    |x| <= sqrt|bc|, |y| <= sqrt|ac|, |z| <= sqrt|ab|, so sweeping the two
    smallest bounds and solving for the third coordinate always lands.
    """
    form = _as_form(form)
    if not is_soluble(form):
        return None
    (m0, m1, m2), back = form.reduced()
    m = [m0, m1, m2]
    bounds = [
        math.isqrt(abs(m[1] * m[2])),
        math.isqrt(abs(m[0] * m[2])),
        math.isqrt(abs(m[0] * m[1])),
    ]
    k = max(range(3), key=lambda i: bounds[i])
    i, j = [t for t in range(3) if t != k]
    if (bounds[i] + 1) * (bounds[j] + 1) > _SEARCH_CAP:
        raise InvalidInputError("conic coefficients too large for the point search")
    for u in range(bounds[i] + 1):
        base = m[i] * u * u
        for v in range(bounds[j] + 1):
            rhs = -(base + m[j] * v * v)
            t2, rem = divmod(rhs, m[k])
            if rem or t2 < 0:
                continue
            t = math.isqrt(t2)
            if t * t != t2 or (u == 0 and v == 0 and t == 0):
                continue
            w = [0, 0, 0]
            w[i], w[j], w[k] = u, v, t
            x = canonicalize([sum(back[r][s] * w[s] for s in range(3)) for r in range(3)]).coords
            if form.evaluate(x) != 0:
                raise EngineError("point search produced a non-point")
            return x
    raise EngineError("no point inside the Holzer bounds on a soluble conic")


# ---------------------------------------------------------------------------
# parametrization


def _complete_primitive(p: tuple[int, int, int]):
    """Integer vectors E1, E2 with det[p | E1 | E2] = +-1."""
    p0, p1, p2 = p
    g01 = math.gcd(p0, p1)
    if g01 == 0:
        return (1, 0, 0), (0, 1, 0)
    x, y = extgcd(p0, p1)
    s, t = extgcd(g01, p2)
    e1 = (-y, x, 0)
    e2 = (-t * (p0 // g01), -t * (p1 // g01), s)
    return e1, e2


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _mdot(m, a, b):
    return sum(m[i][j] * a[i] * b[j] for i in range(3) for j in range(3))


def _size_reduce(e, p):
    # shrink e by integer multiples of p (Euclidean projection)
    k = round(Fraction(_dot(e, p), _dot(p, p)))
    return tuple(e[i] - k * p[i] for i in range(3))


def _reduce_basis(p, e1, e2):
    """Lagrange-reduce (E1, E2) on the plane orthogonal to p."""
    pp = Fraction(_dot(p, p))

    def perp_dot(a, b):
        return Fraction(_dot(a, b)) - Fraction(_dot(a, p)) * _dot(b, p) / pp

    e1 = _size_reduce(e1, p)
    e2 = _size_reduce(e2, p)
    for _ in range(64):
        n1 = perp_dot(e1, e1)
        if n1 == 0:
            raise EngineError("degenerate completion basis")
        k = round(perp_dot(e1, e2) / n1)
        if k:
            e2 = tuple(e2[i] - k * e1[i] for i in range(3))
        if perp_dot(e2, e2) < n1:
            e1, e2 = e2, e1
        else:
            break
    return _size_reduce(e1, p), _size_reduce(e2, p)


def _binary_quadratic_resultant(f, g) -> int:
    # f = (a, b, c) meaning a u^2 + b uv + c v^2
    a1, b1, c1 = f
    a2, b2, c2 = g
    return (a1 * c2 - a2 * c1) ** 2 - (a1 * b2 - a2 * b1) * (b1 * c2 - b2 * c1)


def _split_small(n: int, bound: int = 10000):
    """Factor out primes <= bound; return ({p: e}, cofactor)."""
    n = abs(n)
    small: dict[int, int] = {}
    for p in (2, 3, 5, 7):
        while n % p == 0:
            small[p] = small.get(p, 0) + 1
            n //= p
    f = 11
    while f <= bound and f * f <= n:
        while n % f == 0:
            small[f] = small.get(f, 0) + 1
            n //= f
        f += 2
    if 1 < n <= bound * bound:
        small[n] = small.get(n, 0) + 1
        n = 1
    return small, n


def _achievable_content_exponent(phi, p: int, cap: int, budget: int = 20000) -> int:
    """Largest k <= cap with a primitive (u, v) mod p^k killing all phi mod p^k.

    Breadth-first lifting.  If the tree outgrows the budget the cap is
    returned, which only ever loosens the region, never breaks it.
    """
    level = [(u, v) for u in range(p) for v in range(p) if u or v]
    mod = p
    sols = [(u, v) for (u, v) in level if all(_phi_eval(c, u, v) % mod == 0 for c in phi)]
    k = 0
    while sols and k < cap:
        k += 1
        if k == cap:
            break
        nxt = []
        nxt_mod = mod * p
        for (u, v) in sols:
            for du in range(p):
                uu = u + du * mod
                for dv in range(p):
                    vv = v + dv * mod
                    if uu % p == 0 and vv % p == 0:
                        continue
                    if all(_phi_eval(c, uu, vv) % nxt_mod == 0 for c in phi):
                        nxt.append((uu, vv))
        if len(nxt) > budget:
            return cap
        sols = nxt
        mod = nxt_mod
    return k


def _phi_eval(coeffs, u, v):
    a, b, c = coeffs
    return a * u * u + b * u * v + c * v * v


@dataclass(frozen=True)
class ConicParam:
    """Proper parametrization of a soluble conic.

    phi is a triple of integer binary quadratics; (u : v) -> phi(u, v)
    divided by its gcd is a bijection P^1(Q) -> C(Q).  content_bound
    dominates that gcd for every coprime (u, v), which is what makes the
    box pullback finite.  tangent is the parameter mapping to the base
    point itself.
    """

    form: TernaryForm
    point: tuple[int, int, int]
    basis: tuple
    phi: tuple
    content_bound: int
    tangent: tuple[int, int]

    def raw(self, u: int, v: int) -> tuple[int, int, int]:
        return tuple(_phi_eval(c, u, v) for c in self.phi)

    def map_point(self, u: int, v: int) -> tuple[int, int, int]:
        if u == 0 and v == 0:
            raise InvalidInputError("(0, 0) is not a parameter")
        return canonicalize(self.raw(u, v)).coords


def parametrize(form, point=None) -> ConicParam:
    """Build the tangent-line parametrization through a rational point."""
    form = _as_form(form)
    if point is None:
        point = find_point(form)
        if point is None:
            raise InvalidInputError("conic has no rational points")
    else:
        point = canonicalize(point).coords
        if form.evaluate(point) != 0:
            raise InvalidInputError("base point does not lie on the conic")
    e1, e2 = _complete_primitive(point)
    e1, e2 = _reduce_basis(point, e1, e2)

    mm = form.matrix
    qa = _mdot(mm, e1, e1)
    qb = _mdot(mm, e1, e2)
    qc = _mdot(mm, e2, e2)
    l1 = _mdot(mm, point, e1)
    l2 = _mdot(mm, point, e2)
    if l1 == 0 and l2 == 0:
        raise EngineError("base point is a singular point of the form")

    phi = []
    for j in range(3):
        cu2 = qa * point[j] - 2 * l1 * e1[j]
        cuv = 2 * (qb * point[j] - l1 * e2[j] - l2 * e1[j])
        cv2 = qc * point[j] - 2 * l2 * e2[j]
        phi.append((cu2, cuv, cv2))
    c0 = math.gcd(*(abs(c) for triple in phi for c in triple))
    if c0 > 1:
        phi = [tuple(c // c0 for c in triple) for triple in phi]
    phi = tuple(phi)

    # Q(phi) is a binary quartic; vanishing at five distinct parameters
    # forces it to vanish identically
    for (u, v) in ((1, 0), (0, 1), (1, 1), (2, -3), (3, 1)):
        if form.evaluate([_phi_eval(c, u, v) for c in phi]) != 0:
            raise EngineError("parametrization does not land on the conic")

    g = math.gcd(l1, l2)
    tangent = (-l2 // g, l1 // g)
    if tangent[0] < 0 or (tangent[0] == 0 and tangent[1] < 0):
        tangent = (-tangent[0], -tangent[1])
    img = canonicalize(tuple(_phi_eval(c, *tangent) for c in phi)).coords
    if img != point and img != tuple(-t for t in point):
        raise EngineError("tangent parameter misses the base point")

    return ConicParam(
        form=form,
        point=point,
        basis=(e1, e2),
        phi=phi,
        content_bound=_content_bound(phi),
        tangent=tangent,
    )


def _content_bound(phi) -> int:
    """Certified multiple of gcd(phi(u, v)) over all coprime (u, v).

    Any common divisor g of the three values divides each pairwise
    resultant (g | Res * u^3 and g | Res * v^3 via the Bezout cubics),
    so the gcd of the nonzero resultants works; when a pair of the
    quadratics shares a root, linear combinations restore a nonzero
    resultant.  Small primes are then tightened to the largest content
    actually achieved by lifting solutions of phi = 0 mod p^k.
    """
    candidates = []
    for i in range(3):
        for j in range(i + 1, 3):
            r = _binary_quadratic_resultant(phi[i], phi[j])
            if r:
                candidates.append(abs(r))
    if not candidates:
        combos = []
        for lam in (1, -1, 2, -2, 3, 5):
            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    k = 3 - i - j
                    mixed = tuple(phi[i][t] + lam * phi[j][t] for t in range(3))
                    r = _binary_quadratic_resultant(mixed, phi[k])
                    if r:
                        combos.append(abs(r))
            if combos:
                break
        if not combos:
            raise EngineError("all resultant combinations vanished")
        candidates = combos
    g0 = 0
    for r in candidates:
        g0 = math.gcd(g0, r)
    if g0 == 0:
        raise EngineError("content bound collapsed to zero")

    small, cofactor = _split_small(g0)
    bound = cofactor
    for p, e in small.items():
        if p <= 257:
            e = _achievable_content_exponent(phi, p, e)
        bound *= p**e
    return bound


# ---------------------------------------------------------------------------
# exact integer intervals for |A v^2 + B v + C| <= K


def _floor_plus(x: int, d: int, y: int) -> int:
    """floor((x + sqrt(d)) / y) for d >= 0, y > 0."""
    s = math.isqrt(d)
    q = (x + s) // y
    while True:
        t = (q + 1) * y - x
        if t <= 0 or t * t <= d:
            q += 1
        else:
            return q


def _floor_minus(x: int, d: int, y: int) -> int:
    """floor((x - sqrt(d)) / y) for d >= 0, y > 0."""
    s = math.isqrt(d)
    q = (x - s) // y
    while True:
        t = x - q * y
        if t >= 0 and t * t >= d:
            return q
        q -= 1


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _quad_abs_le(A: int, B: int, C: int, K: int, lo: int, hi: int):
    """Integer v in [lo, hi] with |A v^2 + B v + C| <= K, as intervals."""
    if A == 0:
        if B == 0:
            return [(lo, hi)] if abs(C) <= K else []
        if B > 0:
            a, b = _ceil_div(-K - C, B), (K - C) // B
        else:
            a, b = _ceil_div(K - C, B), (-K - C) // B
        a, b = max(a, lo), min(b, hi)
        return [(a, b)] if a <= b else []
    if A < 0:
        A, B, C = -A, -B, -C
    # inside: A v^2 + B v + (C - K) <= 0
    d1 = B * B - 4 * A * (C - K)
    if d1 < 0:
        return []
    band_lo = max(-_floor_plus(B, d1, 2 * A), lo)
    band_hi = min(_floor_plus(-B, d1, 2 * A), hi)
    if band_lo > band_hi:
        return []
    # outside: A v^2 + B v + (C + K) >= 0
    d2 = B * B - 4 * A * (C + K)
    if d2 <= 0:
        return [(band_lo, band_hi)]
    left_hi = min(_floor_minus(-B, d2, 2 * A), band_hi)
    right_lo = max(-_floor_minus(B, d2, 2 * A), band_lo)
    out = []
    if band_lo <= left_hi:
        out.append((band_lo, left_hi))
    if max(right_lo, left_hi + 1) <= band_hi:
        out.append((max(right_lo, left_hi + 1), band_hi))
    return out


def _intersect_intervals(xs, ys):
    out = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        lo = max(xs[i][0], ys[j][0])
        hi = min(xs[i][1], ys[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if xs[i][1] < ys[j][1]:
            i += 1
        else:
            j += 1
    return out


# ---------------------------------------------------------------------------
# parametrized counting


def _param_disk_radius(phi, caps) -> int:
    """U with: max_j |phi_j(u,v)| <= caps_j forces u^2 + v^2 <= U^2.

    Certified by a grid minimum of the scaled forms on the unit circle
    minus a Lipschitz slack; phi is even, so half a turn suffices.
    """
    weights = [1.0 / c for c in caps]
    lip = max(
        w * (abs(a - c) + abs(b)) for w, (a, b, c) in zip(weights, phi)
    )
    n = 1024
    while True:
        step = math.pi / n
        best = math.inf
        for i in range(n):
            th = (i + 0.5) * step
            co, si = math.cos(th), math.sin(th)
            cc, cs, ss = co * co, co * si, si * si
            f = max(
                w * abs(a * cc + b * cs + c * ss)
                for w, (a, b, c) in zip(weights, phi)
            )
            if f < best:
                best = f
        low = best - lip * step / 2
        low *= 1 - 1e-9
        if low > 0:
            return math.isqrt(int(1 / low)) + 1
        n *= 4
        if n > 4_000_000:
            raise EngineError("could not certify a parameter disk radius")


def _param_scan_python(phi, caps, box, radius):
    b0, b1, b2 = box
    count = 0
    rmax = 0
    (a0, c0, d0), (a1, c1, d1), (a2, c2, d2) = phi
    for u in range(radius + 1):
        uu = u * u
        ivs = [(-radius, radius)]
        for (A, B, C), K in zip(phi, caps):
            ivs = _intersect_intervals(ivs, _quad_abs_le(C, B * u, A * uu, K, -radius, radius))
            if not ivs:
                break
        for lo, hi in ivs:
            for v in range(lo, hi + 1):
                if u == 0:
                    if v != 1:
                        continue
                elif math.gcd(u, v) != 1:
                    continue
                vv = v * v
                w0 = a0 * uu + c0 * u * v + d0 * vv
                w1 = a1 * uu + c1 * u * v + d1 * vv
                w2 = a2 * uu + c2 * u * v + d2 * vv
                if w2 == 0:
                    continue
                g = math.gcd(w0, w1, w2)
                if abs(w0) <= g * b0 and abs(w1) <= g * b1 and abs(w2) <= g * b2:
                    count += 1
                    r = max(u, -v if v < 0 else v)
                    if r > rmax:
                        rmax = r
    return count, rmax


def _param_scan_numpy(phi, caps, box, radius):
    b0, b1, b2 = box
    count = 0
    rmax = 0
    for u in range(radius + 1):
        uu = u * u
        ivs = [(-radius, radius)]
        for (A, B, C), K in zip(phi, caps):
            ivs = _intersect_intervals(ivs, _quad_abs_le(C, B * u, A * uu, K, -radius, radius))
            if not ivs:
                break
        if not ivs:
            continue
        v = _np.concatenate([_np.arange(lo, hi + 1, dtype=_np.int64) for lo, hi in ivs])
        if u == 0:
            v = v[v == 1]
            if v.size == 0:
                continue
        else:
            v = v[_np.gcd(u, _np.abs(v)) == 1]
            if v.size == 0:
                continue
        vv = v * v
        w0 = phi[0][0] * uu + phi[0][1] * u * v + phi[0][2] * vv
        w1 = phi[1][0] * uu + phi[1][1] * u * v + phi[1][2] * vv
        w2 = phi[2][0] * uu + phi[2][1] * u * v + phi[2][2] * vv
        g = _np.gcd(_np.gcd(_np.abs(w0), _np.abs(w1)), _np.abs(w2))
        ok = (
            (w2 != 0)
            & (_np.abs(w0) <= g * b0)
            & (_np.abs(w1) <= g * b1)
            & (_np.abs(w2) <= g * b2)
        )
        c = int(_np.count_nonzero(ok))
        if c:
            count += c
            r = max(u, int(_np.abs(v[ok]).max()))
            if r > rmax:
                rmax = r
    return count, rmax


def _count_parametrized(form: TernaryForm, box) -> int:
    b0, b1, b2 = box
    param = parametrize(form)
    phi = param.phi
    caps = [param.content_bound * b for b in box]
    radius = _param_disk_radius(phi, caps)
    while True:
        coeff = max(abs(c) for triple in phi for c in triple)
        safe = (
            _np is not None
            and coeff * 3 * (radius + 1) ** 2 < _I64
            and coeff * 3 * (radius + 1) ** 2 * b0 < _I64
        )
        scan = _param_scan_numpy if safe else _param_scan_python
        count, rmax = scan(phi, caps, box, radius)
        if rmax < radius:
            return count
        # a counted point sat on the rim: distrust the radius and widen
        radius = 2 * radius + 2


# ---------------------------------------------------------------------------
# box counting


def _gram_abc(m, x1, x2):
    """Q(x0, x1, x2) = A x0^2 + B x0 + C with A = m00."""
    B = 2 * (m[0][1] * x1 + m[0][2] * x2)
    C = m[1][1] * x1 * x1 + 2 * m[1][2] * x1 * x2 + m[2][2] * x2 * x2
    return B, C


def _count_box_python(m, b0, b1, b2, x2_start) -> int:
    count = 0
    A = m[0][0]
    twoA = 2 * A
    for x2 in range(x2_start, b2 + 1):
        for x1 in range(-b1, b1 + 1):
            B, C = _gram_abc(m, x1, x2)
            if A == 0:
                if B == 0:
                    if C == 0:
                        raise EngineError("degenerate pencil line inside the conic")
                    continue
                q, r = divmod(-C, B)
                if r == 0 and abs(q) <= b0 and math.gcd(q, x1, x2) == 1:
                    count += 1
                continue
            d = B * B - 4 * A * C
            if d < 0:
                continue
            s = math.isqrt(d)
            if s * s != d:
                continue
            for num in ((-B + s), (-B - s)) if s else ((-B),):
                q, r = divmod(num, twoA)
                if r == 0 and abs(q) <= b0 and math.gcd(q, x1, x2) == 1:
                    count += 1
    return count


def _count_box_numpy(m, b0, b1, b2, x2_start) -> int:
    count = 0
    A = m[0][0]
    twoA = 2 * A
    x1 = _np.arange(-b1, b1 + 1, dtype=_np.int64)
    ax1 = _np.abs(x1)
    for x2 in range(x2_start, b2 + 1):
        B = 2 * (m[0][1] * x1 + m[0][2] * x2)
        C = m[1][1] * x1 * x1 + (2 * m[1][2] * x2) * x1 + m[2][2] * x2 * x2
        if A == 0:
            ok = B != 0
            if not ok.all() and bool((C[~ok] == 0).any()):
                raise EngineError("degenerate pencil line inside the conic")
            Bs = _np.where(ok, B, 1)
            q = -C // Bs
            good = ok & (q * Bs == -C) & (_np.abs(q) <= b0)
            good &= _np.gcd(_np.gcd(_np.abs(q), ax1), x2) == 1
            count += int(_np.count_nonzero(good))
            continue
        d = B * B - 4 * A * C
        pos = d >= 0
        if not pos.any():
            continue
        dp = _np.where(pos, d, 0)
        s = _np.sqrt(dp.astype(_np.float64)).astype(_np.int64)
        for _ in range(2):
            s = _np.where((s + 1) * (s + 1) <= dp, s + 1, s)
            s = _np.where(s * s > dp, s - 1, s)
        sq = pos & (s * s == dp)
        total = _np.zeros(x1.shape, dtype=_np.int64)
        for signbit in (1, -1):
            num = -B + signbit * s
            q = num // twoA
            good = sq & (q * twoA == num) & (_np.abs(q) <= b0)
            good &= _np.gcd(_np.gcd(_np.abs(q), ax1), x2) == 1
            total += good
        # s == 0 would count the double root twice
        total -= (sq & (s == 0) & (total == 2)).astype(_np.int64)
        count += int(total.sum())
    return count


def _box_numpy_safe(m, b0, b1, b2) -> bool:
    if _np is None:
        return False
    bmax = max(b1, b2)
    Bmax = 2 * (abs(m[0][1]) + abs(m[0][2])) * bmax
    Cmax = (abs(m[1][1]) + 2 * abs(m[1][2]) + abs(m[2][2])) * bmax * bmax
    dmax = Bmax * Bmax + 4 * abs(m[0][0]) * Cmax
    return dmax < _I64 and (Bmax + math.isqrt(dmax) + 1) < _I64


def _count_box(form: TernaryForm, box) -> int:
    b0, b1, b2 = box
    if b2 < 1:
        return 0
    m = form.matrix
    if _box_numpy_safe(m, b0, b1, b2):
        return _count_box_numpy(m, b0, b1, b2, 1)
    return _count_box_python(m, b0, b1, b2, 1)


def count_box_points(form, bounds, include_plane_at_infinity: bool = False) -> int:
    """Points of the conic whose canonical coordinates fit in the box.

    Counts projective points with |x_j| <= bounds_j and x2 != 0; the flag
    adds the (at most two) points on x2 = 0 as well.
    """
    form = _as_form(form)
    b0, b1, b2 = (int(b) for b in bounds)
    if min(b0, b1, b2) < 0:
        raise InvalidInputError("box bounds must be nonnegative")
    m = form.matrix
    count = _count_box_python(m, b0, b1, b2, 1) if b2 >= 1 else 0
    if not include_plane_at_infinity:
        return count
    # slice x2 = 0: a00 x0^2 + 2 a01 x0 x1 + a11 x1^2 = 0
    if m[0][0] == 0 and b0 >= 1:
        count += 1  # the point (1 : 0 : 0)
    for x1 in range(1, b1 + 1):
        A, B, C = m[0][0], 2 * m[0][1] * x1, m[1][1] * x1 * x1
        if A == 0:
            if B != 0:
                q, r = divmod(-C, B)
                if r == 0 and 0 < abs(q) <= b0 and math.gcd(q, x1) == 1:
                    count += 1
            continue
        d = B * B - 4 * A * C
        if d < 0:
            continue
        s = math.isqrt(d)
        if s * s != d:
            continue
        for num in ((-B + s), (-B - s)) if s else ((-B),):
            q, r = divmod(num, 2 * A)
            if r == 0 and abs(q) <= b0 and math.gcd(q, x1) == 1:
                count += 1
    return count


# ---------------------------------------------------------------------------
# fibre counting

_AUTO_BOX_LIMIT = 200_000


def count_fibre(surface, model: HeightModel, y, bound, strategy: str = "auto") -> int:
    """Number of primitive integer solutions on the fibre over y with
    x2 != 0 and height <= bound, counting x and -x separately.

    The fibre must be smooth.  Each projective point with x2 != 0 has
    exactly two primitive representatives, one with x2 > 0, so this is
    twice the projective count.  The signed convention is the one under
    which count/bound converges to the local density product tamagawa():
    measured against the closed formula on x0^2+x1^2 = t*x2^2 at t=1
    (8/pi) and independently on a split conic calibrated by the exact
    Schanuel constant 12/pi^2, the per-point normalization comes out
    low by exactly the factor 2 that the +-x pair restores.

    The height condition is exactly the box |x_j| <= b_j from the
    model, so both strategies count the same set.
    """
    if strategy not in _STRATEGIES:
        raise InvalidInputError(f"unknown strategy {strategy!r}")
    fc = fibre_class(surface, y)
    if not fc.smooth:
        raise InvalidInputError(f"fibre over {fc.y} is singular")
    if (model.n, model.a, model.e) != (surface.n, surface.a, surface.e):
        raise InvalidInputError("height model does not match the surface")
    box = fibre_box(model, fc.y, bound)
    if box[2] < 1:
        return 0
    form = TernaryForm(fc.gram)
    if not is_soluble(form):
        return 0
    if strategy == "both":
        a = _count_box(form, box)
        b = _count_parametrized(form, box)
        if a != b:
            raise EngineError(f"strategies disagree on {fc.y}: box {a}, parametrized {b}")
        return 2 * a
    if strategy == "auto":
        strategy = "box" if (2 * box[1] + 1) * box[2] <= _AUTO_BOX_LIMIT else "parametrized"
    if strategy == "box":
        return 2 * _count_box(form, box)
    return 2 * _count_parametrized(form, box)


# ---------------------------------------------------------------------------
# box uniformity diagnostic


def bsj_diagnostic(form, bounds) -> float:
    """Upper-bound scale for conic points in a box.

    tau(|det|) * ((D0^(3/2) B1 B2 B3 / |det|)^(1/3) + 1) with D0 the gcd
    of the 2x2 minors; the point count in any box is O of this times an
    absolute constant, uniformly in the form.
    """
    form = _as_form(form)
    b = [int(x) for x in bounds]
    if min(b) < 0:
        raise InvalidInputError("box bounds must be nonnegative")
    det = abs(form.det)
    d0 = form.minors_gcd
    vol = (d0**1.5 * b[0] * b[1] * b[2] / det) ** (1.0 / 3.0)
    return divisor_count(det) * (vol + 1.0)
