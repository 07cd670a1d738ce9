"""Offline generation of newform coefficient fixtures.

Weight-2 trivial-character forms are produced from elliptic curves: a
coefficient-box search, Tate's algorithm for conductors and bad-prime
Euler data, and point counts for good primes.  Higher-weight spaces are
built as explicit q-expansion spaces spanned by Eisenstein products and
embedded lower-level forms, certified complete against dimension
formulas, then split into Hecke eigenspaces by exact linear algebra.

Run ``python -m hgtrace.newform_search`` to (re)generate the fixtures
shipped under ``data/fixtures``.
"""

import json
import time
from fractions import Fraction
from math import gcd, isqrt

from sympy import factorint

from .dirichlet import (
    CharGroup,
    bernoulli_chi,
    dim_cusp,
    dim_new,
    e2d,
    eisenstein_qexp,
    kronecker,
)


def _cyc_trace(n, j):
    """Trace of zeta_n^j from Q(zeta_n) down to Q."""
    from sympy import mobius, totient
    g = gcd(j, n)
    m = n // g
    return Fraction(int(totient(n)) * int(mobius(m)), int(totient(m)))


# ---------------------------------------------------------------------------
# elliptic curves: invariants, Tate's algorithm, point counts
# ---------------------------------------------------------------------------

def _b_invariants(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def curve_disc(a):
    b2, b4, b6, b8 = _b_invariants(a)
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def _c4(a):
    b2, b4, _, _ = _b_invariants(a)
    return b2 * b2 - 24 * b4


def _translate(a, r, s, t):
    """Substitute x -> x + r, y -> y + s*x + t."""
    a1, a2, a3, a4, a6 = a
    na1 = a1 + 2 * s
    na2 = a2 - s * a1 + 3 * r - s * s
    na3 = a3 + r * a1 + 2 * t
    na4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    na6 = a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1
    return (na1, na2, na3, na4, na6)


def _vp(n, p):
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _singular_point(a, p):
    a1, a2, a3, a4, a6 = a
    for x in range(p):
        for y in range(p):
            f = y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6
            fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
            fy = 2 * y + a1 * x + a3
            if f % p == 0 and fx % p == 0 and fy % p == 0:
                return x, y
    raise AssertionError("no singular point mod %d" % p)


def _mult_split(a, p):
    """+1 for split multiplicative reduction, -1 for non-split."""
    x0, y0 = _singular_point(a, p)
    a_sh = _translate(a, x0, 0, y0)
    a1, a2 = a_sh[0], a_sh[1]
    # tangent cone Y^2 + a1*XY - (3*x0'+a2)X^2 with the point at the origin
    roots = sum(1 for T in range(p) if (T * T + a1 * T - a2) % p == 0)
    assert roots in (0, 2) or p == 2 and roots in (0, 2), roots
    return 1 if roots == 2 else -1


def tate_local(a, p):
    """Conductor exponent and bad-prime a_p at p.

    Returns (f, ap, model): f = 0 for good reduction (ap None), f = 1 for
    multiplicative (ap = +-1), f >= 2 additive (ap = 0).  The returned
    model is input transformed by any translations/rescalings applied.
    """
    while True:
        disc = curve_disc(a)
        n = _vp(disc, p)
        if n == 0:
            return 0, None, a
        if _vp(_c4(a), p) == 0:
            return 1, _mult_split(a, p), a
        # additive; for p >= 5 the reduction is tame once the model is
        # minimal at p, so first strip any u = p rescaling
        if p >= 5:
            if n >= 12:
                reduced = _minimalize_at(a, p)
                if reduced is not None:
                    a = reduced
                    continue
            return 2, 0, a
        x0, y0 = _singular_point(a, p)
        a = _translate(a, x0, 0, y0)
        if _vp(a[4], p) < 2:
            return n, 0, a                      # type II
        b2, b4, b6, b8 = _b_invariants(a)
        if _vp(b8, p) < 3:
            return n - 1, 0, a                  # type III
        if _vp(b6, p) < 3:
            return n - 2, 0, a                  # type IV
        # normalize: p|a1,a2  p^2|a3,a4  p^3|a6
        a = _normalize_step6(a, p)
        p2, p3 = p * p, p ** 3
        # cubic T^3 + (a2/p)T^2 + (a4/p^2)T + a6/p^3 over F_p
        c2, c1, c0 = (a[1] // p) % p, (a[3] // p2) % p, (a[4] // p3) % p
        rep = _cubic_repeated_root(c2, c1, c0, p)
        if rep is None:
            return n - 4, 0, a                  # type I_0*
        kind, r0 = rep
        a = _translate(a, p * r0, 0, 0)
        if kind == "double":
            f = _insstar_loop(a, p, n)
            return f, 0, a                      # type I_m*
        # triple root: quadratic Y^2 + (a3/p^2)Y - a6/p^4
        q3, q6 = (a[2] // p2) % p, (a[4] // p2 ** 2) % p
        if (q3 * q3 + 4 * q6) % p:
            return n - 6, 0, a                  # type IV*
        y1 = _quad_double_root(1, q3, -q6, p)
        a = _translate(a, 0, 0, p2 * y1)
        if _vp(a[3], p) < 4:
            return n - 7, 0, a                  # type III*
        if _vp(a[4], p) < 6:
            return n - 8, 0, a                  # type II*
        # non-minimal: rescale u = p and restart
        a = (a[0] // p, a[1] // p2, a[2] // p3, a[3] // p2 ** 2,
             a[4] // p3 ** 2)


def _minimalize_at(a, p):
    """Undo a u = p rescaling at p >= 5 if possible, else None."""
    p2, p3, p4, p6 = p * p, p ** 3, p ** 4, p ** 6
    for s in range(p):
        for r in range(p2):
            for t in range(p3):
                c = _translate(a, r, s, t)
                if (c[0] % p == 0 and c[1] % p2 == 0 and c[2] % p3 == 0
                        and c[3] % p4 == 0 and c[4] % p6 == 0):
                    return (c[0] // p, c[1] // p2, c[2] // p3,
                            c[3] // p4, c[4] // p6)
    return None


def _normalize_step6(a, p):
    p2, p3 = p * p, p ** 3
    for s in range(p):
        for r in range(0, p3, p):
            for t in range(0, p3, p):
                c = _translate(a, r, s, t)
                if (c[0] % p == 0 and c[1] % p == 0 and c[2] % p2 == 0
                        and c[3] % p2 == 0 and c[4] % p3 == 0):
                    return c
    raise AssertionError("step-6 normalization failed")


def _cubic_repeated_root(c2, c1, c0, p):
    """Repeated-root structure of T^3+c2T^2+c1T+c0 over F_p, or None."""
    disc = (18 * c2 * c1 * c0 - 4 * c2 ** 3 * c0 + c2 * c2 * c1 * c1
            - 4 * c1 ** 3 - 27 * c0 * c0)
    if disc % p:
        return None
    for r in range(p):
        val = (r ** 3 + c2 * r * r + c1 * r + c0) % p
        der = (3 * r * r + 2 * c2 * r + c1) % p
        if val == 0 and der == 0:
            # triple iff the cubic is (T - r)^3 mod p
            if ((c2 + 3 * r) % p == 0 and (c1 - 3 * r * r) % p == 0
                    and (c0 + r ** 3) % p == 0):
                return "triple", r
            return "double", r
    raise AssertionError("inseparable cubic without F_p repeated root")


def _quad_double_root(qa, qb, qc, p):
    for y in range(p):
        if (qa * y * y + qb * y + qc) % p == 0:
            return y
    raise AssertionError("no root of inseparable quadratic")


def _insstar_loop(a, p, n):
    """Tate step 7 subprocedure (type I_m*); returns conductor exponent."""
    m = 1
    mx = my = p * p
    while True:
        a2t = (a[1] // p) % p
        a3t = (a[2] // my) % p
        a6t = (a[4] // (mx * my)) % p
        if (a3t * a3t + 4 * a6t) % p:
            return n - 4 - m
        y1 = _quad_double_root(1, a3t, -a6t, p)
        a = _translate(a, 0, 0, my * y1)
        m += 1
        a4t = (a[3] // (p * mx)) % p
        a6t = (a[4] // (p * mx * my)) % p
        if (a4t * a4t - 4 * a2t * a6t) % p:
            return n - 4 - m
        x1 = _quad_double_root(a2t, a4t, a6t, p)
        a = _translate(a, mx * x1, 0, 0)
        m += 1
        mx *= p
        my *= p


def curve_conductor(a):
    """(conductor, {p: local a_p for bad p}, model) for an integral curve."""
    disc = curve_disc(a)
    assert disc != 0
    N = 1
    bad = {}
    model = a
    for p in sorted(factorint(abs(disc))):
        f, ap, model = tate_local(model, p)
        if f:
            N *= p ** f
            bad[p] = ap
    return N, bad, model


def curve_ap_good(a, p):
    """a_p at an odd prime of good reduction, by a character sum."""
    b2, b4, b6, _ = _b_invariants(a)
    total = 0
    # 2^((p-1)/2)-style Legendre evaluation via Euler's criterion
    for x in range(p):
        v = (4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6) % p
        if v:
            total += 1 if pow(v, (p - 1) // 2, p) == 1 else -1
    return -total


def curve_an(a, bad, n_max=200):
    """Coefficients a_1..a_n_max of the weight-2 newform attached to a."""
    ap = {}
    for p in _primes(n_max):
        ap[p] = bad[p] if p in bad else curve_ap_good(a, p)
    an = [0] * (n_max + 1)
    an[1] = 1
    for n in range(2, n_max + 1):
        fac = factorint(n)
        p = min(fac)
        q = p ** fac[p]
        if q != n:
            an[n] = an[q] * an[n // q]
            continue
        if p in bad:
            an[n] = bad[p] * an[n // p]
        else:
            an[n] = ap[p] * an[n // p] - p * an[n // (p * p)] \
                if n // p % p == 0 else ap[p] * an[n // p]
    return an[1:]


def _primes(n):
    sieve = [True] * (n + 1)
    out = []
    for p in range(2, n + 1):
        if sieve[p]:
            out.append(p)
            for m in range(p * p, n + 1, p):
                sieve[m] = False
    return out


def isogeny_classes(level, a4_bound=130, a6_bound=600):
    """All isogeny classes of elliptic curves with the given conductor.

    Searches a coefficient box; completeness is certified by the caller
    against the dimension of the rational new subspace.
    Returns a list of curves (one per class) with their bad-prime data.
    """
    support = set(factorint(level))
    found = []
    seen = []
    probes = [p for p in _primes(60) if p not in support]
    for a1 in (0, 1):
        for a2 in (-1, 0, 1):
            for a3 in (0, 1):
                for a4 in range(-a4_bound, a4_bound + 1):
                    for a6 in range(-a6_bound, a6_bound + 1):
                        a = (a1, a2, a3, a4, a6)
                        d = curve_disc(a)
                        if d == 0:
                            continue
                        d = abs(d)
                        for p in support:
                            while d % p == 0:
                                d //= p
                        if d != 1:
                            continue
                        N, bad, model = curve_conductor(a)
                        if N != level:
                            continue
                        sig = tuple(curve_ap_good(model, p) for p in probes)
                        if sig in seen:
                            continue
                        seen.append(sig)
                        found.append((model, bad))
    # saturate with quadratic twists by discriminants supported on the
    # level (a twist can land back at this conductor from outside the box)
    twists = [-1]
    for p in support:
        twists += [p, -p]
    for p in support:
        for q in support:
            if p < q:
                twists += [p * q, -p * q]
    frontier = list(found)
    while frontier:
        model, _ = frontier.pop()
        b2, b4, b6, _b8 = _b_invariants(model)
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
        for d in twists:
            tw = (0, 0, 0, -27 * c4 * d * d, -54 * c6 * d ** 3)
            if curve_disc(tw) == 0:
                continue
            N, bad, tmodel = curve_conductor(tw)
            if N != level:
                continue
            sig = tuple(curve_ap_good(tmodel, p) for p in probes)
            if sig in seen:
                continue
            seen.append(sig)
            found.append((tmodel, bad))
            frontier.append((tmodel, bad))
    return found


# ---------------------------------------------------------------------------
# exact linear algebra on q-expansion rows
# ---------------------------------------------------------------------------

def _echelon(rows, ncols=None):
    """Reduced row echelon form; returns (basis_rows, pivot_columns).

    Elimination uses the first ncols columns only (rows keep full length).
    """
    basis = []
    pivots = []
    for row in rows:
        row = list(row)
        limit = len(row) if ncols is None else min(ncols, len(row))
        for b, c in zip(basis, pivots):
            if row[c]:
                f = row[c]
                for j in range(len(row)):
                    row[j] -= f * b[j]
        piv = next((j for j in range(limit) if row[j]), None)
        if piv is None:
            continue
        inv = Fraction(1) / row[piv]
        row = [x * inv for x in row]
        for b in basis:
            if b[piv]:
                f = b[piv]
                for j in range(len(row)):
                    b[j] -= f * row[j]
        basis.append(row)
        pivots.append(piv)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [basis[i] for i in order], sorted(pivots)


def _coords(basis, pivots, vec):
    """Coordinates of vec in a reduced echelon basis, or None."""
    out = [vec[c] for c in pivots]
    resid = list(vec)
    for x, b in zip(out, basis):
        if x:
            for j in range(len(resid)):
                resid[j] -= x * b[j]
    if any(resid):
        return None
    return out


def _rank_union(rows_a, rows_b, ncols):
    basis, _ = _echelon(list(rows_a) + list(rows_b), ncols)
    return len(basis)


# ---------------------------------------------------------------------------
# Eisenstein eigensystems for a space M_k(N, chi)
# ---------------------------------------------------------------------------

def _divisors(N):
    return [d for d in range(1, N + 1) if N % d == 0]


def _lcm(a, b):
    return a * b // gcd(a, b)


_PRIM_CACHE = {}


def _primitive_chars(f):
    if f not in _PRIM_CACHE:
        _PRIM_CACHE[f] = [c for c in CharGroup(f).characters()
                          if c.conductor == f]
    return _PRIM_CACHE[f]


def _char_root(chi, n):
    """chi(n) as a root of unity (order, exponent), or None when 0."""
    e = chi._log_value(n)
    if e is None:
        return None
    return (chi.order, e)


def _root_mul(a, b):
    (ma, ea), (mb, eb) = a, b
    m = _lcm(ma, mb)
    return (m, (ea * (m // ma) + eb * (m // mb)) % m)


def _root_conj(a):
    m, e = a
    return (m, (-e) % m)


_TWO_COS = {1: 2, 2: -2, 3: -1, 4: 0, 6: 1}


def _root_plus_conj(a):
    """zeta + conj(zeta) for a root of unity of order 1,2,3,4,6."""
    m, e = a
    t = m // gcd(e, m)
    return _TWO_COS[t]


def _same_primitive(psi1, psi2, chi):
    """Does the primitive product psi1*psi2 induce the same primitive
    character as chi?  All compared through values at units."""
    f1, f2 = psi1.group.N, psi2.group.N
    L0 = _lcm(_lcm(f1, f2), chi.group.N)
    for n in range(1, L0 + 1):
        if gcd(n, L0) != 1:
            continue
        a = _char_root(psi1, n)
        b = _char_root(psi2, n)
        c = _char_root(chi, n)
        prod = _root_mul(a, b)
        m, e = _root_mul(prod, _root_conj(c))
        if e:
            return False
    return True


def eisenstein_systems(N, k, chi):
    """Ordered pairs (psi1, psi2, t) of primitive characters with
    cond1*cond2*t | N and psi1*psi2 inducing chi; these index a basis of
    the Eisenstein subspace of M_k(N, chi) for k >= 3."""
    assert k >= 3
    out = []
    for f1 in _divisors(N):
        for psi1 in _primitive_chars(f1):
            for f2 in _divisors(N // f1):
                for psi2 in _primitive_chars(f2):
                    if psi1.parity * psi2.parity != (-1) ** k:
                        continue
                    if not _same_primitive(psi1, psi2, chi):
                        continue
                    for t in _divisors(N // (f1 * f2)):
                        out.append((psi1, psi2, t))
    return out


def _eis_eigen_factors(systems, ell, k):
    """Exact rational polynomial factors (as coefficient lists, descending)
    annihilating every Eisenstein T_ell eigenvalue, grouped by Galois
    orbit, deduplicated."""
    factors = set()
    for psi1, psi2, _t in systems:
        z1 = _char_root(psi1, ell)
        z2 = _char_root(psi2, ell)
        q = ell ** (k - 1)
        if max(z1[0] // gcd(z1[1], z1[0]), z2[0] // gcd(z2[1], z2[0])) <= 2:
            v = (1 if z1[1] == 0 or z1[0] // gcd(z1[1], z1[0]) == 1 else -1)
            w = (1 if z2[1] == 0 or z2[0] // gcd(z2[1], z2[0]) == 1 else -1)
            # rational eigenvalue v + w*q
            factors.add((Fraction(1), Fraction(-(v + w * q))))
        else:
            # conjugate pair: X^2 - (v+vbar)X + v*vbar
            tr = _root_plus_conj(z1) + _root_plus_conj(z2) * q
            cross = _root_plus_conj(_root_mul(z1, _root_conj(z2)))
            nm = 1 + q * q + q * cross
            factors.add((Fraction(1), Fraction(-tr), Fraction(nm)))
    return [list(f) for f in sorted(factors)]


# ---------------------------------------------------------------------------
# spanning pools and cusp-space construction for weight >= 3
# ---------------------------------------------------------------------------

def _fundamental_discs(N):
    out = [1]
    for d in _divisors(N):
        for D in (d, -d):
            if D != 1 and _is_fund(D):
                out.append(D)
    return out


def _is_fund(D):
    from .dirichlet import _is_fundamental
    return _is_fundamental(D)


def _fund_of(D):
    """Fundamental discriminant attached to the Kronecker character (D|.)."""
    if D == 1:
        return 1
    s = 1 if D > 0 else -1
    m = abs(D)
    f = 1
    i = 2
    while i * i <= m:
        while m % (i * i) == 0:
            m //= i * i
            f *= i
        i += 1
    cand = s * m
    if cand % 4 in (1, 0):
        pass
    else:
        cand *= 4
    return cand if cand != 1 else 1


def _mul_qexp(a, b, L):
    out = [Fraction(0)] * L
    for i, x in enumerate(a):
        if i >= L:
            break
        if x:
            top = min(L - i, len(b))
            for j in range(top):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _scale_qexp(a, d, L):
    out = [Fraction(0)] * L
    for i, x in enumerate(a):
        if i * d >= L:
            break
        out[i * d] = x
    return out


def _hecke_qexp(a, n, k, N, disc, L):
    """T_n applied to a q-expansion of weight k, level N, nebentypus (disc|.)."""
    Lout = len(a) // n
    out = [Fraction(0)] * Lout
    for m in range(Lout):
        s = Fraction(0)
        for d in _divisors(gcd(n, m) if m else n):
            if m % d:
                continue
            if gcd(d, N) != 1:
                if d > 1:
                    continue
            c = kronecker(disc, d) if d > 1 else 1
            if c:
                idx = m * n // (d * d)
                if idx < len(a):
                    s += c * d ** (k - 1) * a[idx]
        out[m] = s
    return out


_W2_CACHE = {}


def _weight2_forms(M, L):
    """q-expansions (length L) of the rational weight-2 newforms of level M."""
    key = M
    if key not in _W2_CACHE:
        classes = isogeny_classes(M)
        assert len(classes) == dim_new(M, 2), (M, len(classes))
        _W2_CACHE[key] = [(model, bad) for model, bad in classes]
    out = []
    for model, bad in _W2_CACHE[key]:
        an = curve_an(model, bad, L - 1)
        out.append([Fraction(0)] + [Fraction(x) for x in an])
    return out


class SpaceBuild:
    """Cusp space of M_k(N, (disc|.)) built from an explicit pool."""

    def __init__(self, N, k, disc=1, length=None):
        self.N, self.k, self.disc = N, k, disc
        grp = CharGroup(N)
        self.chi = next(c for c in grp.characters()
                        if c.order <= 2 and c.discriminant() == disc)
        mu0 = N
        for p in factorint(N):
            mu0 += mu0 // p
        self.sturm = k * mu0 // 12 + 2
        self.L = length or max(210, 14 * self.sturm)
        self.dim_eis = None
        self.dim_cusp = dim_cusp(N, k, self.chi)
        self.dim_new = dim_new(N, k, self.chi)
        self.systems = eisenstein_systems(N, k, self.chi)
        self.dim_eis = len(self.systems)
        self._build()

    # ----- pool -----
    def _atoms(self, w):
        """Unscaled real Eisenstein atoms of weight w: (coeffs, level, disc)."""
        N, out = self.N, []
        for D1 in _fundamental_discs(N):
            for D2 in _fundamental_discs(N):
                lvl = abs(D1) * abs(D2)
                if N % lvl:
                    continue
                sgn = (1 if D1 > 0 else -1) * (1 if D2 > 0 else -1)
                if sgn != (-1) ** w:
                    continue
                if w == 2 and D1 == 1 and D2 == 1:
                    continue
                if w == 1 and D2 == 1 and D1 != 1:
                    # weight-1 series are symmetric in the two characters;
                    # keep the ordering whose constant term is correct
                    continue
                out.append((eisenstein_qexp(w, D1, D2, self.L), lvl,
                            _fund_of(D1 * D2)))
        if w == 2:
            for d in _divisors(N):
                if d > 1:
                    out.append((e2d(d, self.L), d, 1))
            for M in _divisors(N):
                if M > 10 and dim_new(M, 2) > 0:
                    for f in _weight2_forms(M, self.L):
                        out.append((f, M, 1))
        return out

    def _system_atoms(self):
        """Rational rows spanning the Eisenstein subspace exactly.

        Every eigensystem (psi1, psi2, t) contributes the Galois traces
        Tr(zeta^a * E_k^{psi1,psi2}(t tau)) for a = 0..n-1 where n is the
        order of the value field; together these span the rational span of
        the full Galois orbit."""
        k, L = self.k, self.L
        for psi1, psi2, t in self.systems:
            n = _lcm(psi1.order, psi2.order)
            vec = [[Fraction(0)] * n for _ in range(L // t + 1)]
            if psi1.group.N == 1:
                # psi2 then induces the (real) target character
                vec[0][0] = -Fraction(bernoulli_chi(k, self.disc), 2 * k)
            for m in range(1, L // t + 1):
                for d in _divisors(m):
                    r1 = _char_root(psi1, m // d)
                    r2 = _char_root(psi2, d)
                    if r1 is None or r2 is None:
                        continue
                    o, e = _root_mul(r1, r2)
                    vec[m][e * n // o % n] += d ** (k - 1)
            for a in range(n):
                tr = [_cyc_trace(n, (j + a) % n) for j in range(n)]
                row = [Fraction(0)] * L
                for m in range(L // t + 1):
                    if m * t < L:
                        row[m * t] = sum(vec[m][j] * tr[j] for j in range(n)
                                         if vec[m][j])
                yield row

    def _pool_iter(self):
        N, k, L = self.N, self.k, self.L

        def scaled(coeffs, lvl):
            for d in _divisors(N):
                if N % (d * lvl) == 0:
                    yield (_scale_qexp(coeffs, d, L) if d > 1
                           else list(coeffs[:L]))

        # 1. the full Eisenstein subspace, exactly
        for row in self._system_atoms():
            yield row
        # 2. embedded lower-level cusp forms of the same character
        f0 = abs(self.disc) if self.disc != 1 else 1
        for M in _divisors(N):
            if M == N or M % f0 or M < 3:
                continue
            if dim_cusp(M, k, None if self.disc == 1 else
                        _sub_char(M, self.disc)) == 0:
                continue
            sub = space_build(M, k, self.disc, length=self.L)
            for f in sub.cusp_basis:
                for row in scaled(f, M):
                    yield row
        # 3. full-weight real Eisenstein atoms (cheap fillers)
        for coeffs, lvl, dchar in self._atoms(k):
            if dchar == self.disc:
                for row in scaled(coeffs, lvl):
                    yield row
        # 4. products of two lower-weight real atoms, unit scalings first
        halves = {w: self._atoms(w) for w in range(1, k)}
        pairs = []
        for w1 in range(1, k):
            w2 = k - w1
            if w2 < w1:
                break
            for i1, (c1, l1, d1) in enumerate(halves[w1]):
                for i2, (c2, l2, d2) in enumerate(halves[w2]):
                    if w1 == w2 and i2 < i1:
                        continue
                    if _fund_of(d1 * d2) != self.disc:
                        continue
                    if N % _lcm(l1, l2):
                        continue
                    pairs.append((c1, l1, c2, l2))
        scalings = sorted(((e1, e2) for e1 in _divisors(N)
                           for e2 in _divisors(N)), key=lambda t: t[0] * t[1])
        for e1, e2 in scalings:
            for c1, l1, c2, l2 in pairs:
                if N % _lcm(e1 * l1, e2 * l2):
                    continue
                f1 = _scale_qexp(c1, e1, L) if e1 > 1 else c1
                f2 = _scale_qexp(c2, e2, L) if e2 > 1 else c2
                yield _mul_qexp(f1, f2, L)

    # ----- assembly -----
    def _build(self):
        dim_m = self.dim_cusp + self.dim_eis
        raw = []
        pivots_seen = []
        reduced = []          # parallel to raw: rows reduced mod earlier ones
        for row in self._pool_iter():
            r = list(row)
            for rr, p in sorted(zip(reduced, pivots_seen),
                                key=lambda t: t[1]):
                if r[p]:
                    c = r[p] / rr[p]
                    for j in range(p, self.sturm):
                        r[j] -= c * rr[j]
            piv = next((j for j in range(self.sturm) if r[j]), None)
            if piv is None:
                continue
            raw.append(list(row))
            reduced.append(r)
            pivots_seen.append(piv)
            if len(raw) == dim_m:
                break
        if len(raw) != dim_m:
            raise RuntimeError(
                "pool spans %d of %d for M_%d(%d, %d)"
                % (len(raw), dim_m, self.k, self.N, self.disc))
        basis, pivots = _echelon(raw, self.sturm)
        assert len(basis) == dim_m
        self.m_basis, self.m_pivots = basis, pivots
        # T_ell matrix on the full modular space, smallest good ell
        ell = next(p for p in _primes(50) if self.N % p)
        self.ell0 = ell
        tmat = self._op_matrix(basis, pivots, ell)
        ann = _eis_eigen_factors(self.systems, ell, self.k)
        mat = _mat_identity(len(basis))
        for fac in ann:
            mat = _mat_mul(_poly_of_matrix(fac, tmat), mat)
        # cusp space = column space of the annihilator
        cols = _mat_transpose(mat)
        cusp_coords, _ = _echelon(cols, len(basis))
        assert len(cusp_coords) == self.dim_cusp, \
            (len(cusp_coords), self.dim_cusp)
        cusp_rows = [_lin_comb(coords, basis) for coords in cusp_coords]
        self.cusp_basis, self.cusp_pivots = _echelon(cusp_rows, self.sturm)
        assert len(self.cusp_basis) == self.dim_cusp

    def _op_matrix(self, basis, pivots, ell):
        """Matrix (columns = images) of T_ell in the given echelon basis."""
        cols = []
        for b in basis:
            img = _hecke_qexp(b, ell, self.k, self.N, self.disc, self.L)
            m = len(img)
            assert m > self.sturm, "expansion too short for T_%d" % ell
            co = _coords([row[:m] for row in basis], pivots, img)
            assert co is not None, "space not stable under T_%d" % ell
            cols.append(co)
        return _mat_transpose(cols)


_SPACE_CACHE = {}


def space_build(N, k, disc=1, length=None):
    key = (N, k, disc)
    got = _SPACE_CACHE.get(key)
    if got is None or (length and got.L < length):
        _SPACE_CACHE[key] = SpaceBuild(N, k, disc, length)
    return _SPACE_CACHE[key]


def _sub_char(M, disc):
    for c in CharGroup(M).characters():
        if c.order <= 2 and c.discriminant() == disc:
            return c
    return None


# ----- small dense matrix helpers (lists of rows of Fractions) -----

def _mat_identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _mat_mul(A, B):
    n, m, r = len(A), len(B[0]), len(B)
    return [[sum(A[i][t] * B[t][j] for t in range(r)) for j in range(m)]
            for i in range(n)]


def _mat_transpose(A):
    return [list(col) for col in zip(*A)]


def _poly_of_matrix(coeffs, M):
    """Evaluate a monic polynomial (descending coefficients) at a matrix."""
    n = len(M)
    out = _mat_identity(n)
    first = True
    for c in coeffs:
        if first:
            out = [[c * x for x in row] for row in out]
            first = False
            continue
        out = _mat_mul(out, M)
        for i in range(n):
            out[i][i] += c
    return out


def _lin_comb(coords, rows):
    out = [Fraction(0)] * len(rows[0])
    for c, r in zip(coords, rows):
        if c:
            for j in range(len(out)):
                out[j] += c * r[j]
    return out


# ---------------------------------------------------------------------------
# Hecke splitting of the cusp space into newform orbits
# ---------------------------------------------------------------------------

def _sym_matrix(rows):
    from sympy import Matrix, Rational
    return Matrix([[Rational(x.numerator, x.denominator) for x in r]
                   for r in rows])


def _restrict_to(block, mat):
    """Matrix of mat (acting on coordinate columns) in the basis `block`
    (list of coordinate row-vectors).  Requires the block to be stable."""
    rows = [list(b) for b in block]
    basis, pivots = _echelon([list(b) for b in block], len(block[0]))
    cols = []
    for b in block:
        img = [sum(mat[i][j] * b[j] for j in range(len(b)))
               for i in range(len(mat))]
        co = _coords(basis, pivots, img)
        assert co is not None, "block not Hecke-stable"
        cols.append(co)
    # express in the original (unechelonized) block basis
    chg = [_coords(basis, pivots, r) for r in rows]
    ch = _sym_matrix(chg).T
    mm = _sym_matrix(cols).T
    out = ch.inv() * mm
    n = len(block)
    return [[Fraction(int(out[i, j].p), int(out[i, j].q)) for j in range(n)]
            for i in range(n)]


class CuspSplit:
    """Joint Hecke eigendecomposition of S_k(N, (disc|.)) with weight >= 3
    handled by the space builder and old/new classification certified
    against the newspace dimension formula."""

    SPLIT_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)

    def __init__(self, N, k, disc=1):
        self.sb = space_build(N, k, disc)
        self.N, self.k, self.disc = N, k, disc
        self.L = self.sb.L
        self._tmats = {}
        self._split()
        self._classify()
        self._letters()

    # T_ell on the cusp basis, as a coordinate matrix
    def tmat(self, ell):
        if ell not in self._tmats:
            sb = self.sb
            basis, pivots = sb.cusp_basis, sb.cusp_pivots
            cols = []
            for b in basis:
                img = _hecke_qexp(b, ell, self.k, self.N, self.disc, self.L)
                m = len(img)
                assert m > sb.sturm
                co = _coords([row[:m] for row in basis], pivots, img)
                assert co is not None
                cols.append(co)
            self._tmats[ell] = _mat_transpose(cols)
        return self._tmats[ell]

    def _split(self):
        from sympy import Symbol, factor_list, Poly
        X = Symbol("X")
        dim = self.sb.dim_cusp
        blocks = [[_unit_coord(i, dim) for i in range(dim)]] if dim else []
        for ell in self.SPLIT_PRIMES:
            if self.N % ell == 0 or self.L // ell <= self.sb.sturm:
                continue
            if all(len(b) == 1 for b in blocks):
                break
            tm = self.tmat(ell)
            new_blocks = []
            for b in blocks:
                if len(b) == 1:
                    new_blocks.append(b)
                    continue
                sub = _restrict_to(b, tm)
                M = _sym_matrix(sub)
                cp = M.charpoly(X)
                for fac, mult in factor_list(cp.as_expr(), X)[1]:
                    from sympy import Rational
                    coeffs = [Fraction(int(Rational(c).p), int(Rational(c).q))
                              for c in Poly(fac, X).all_coeffs()]
                    km = _poly_of_matrix(coeffs, sub)
                    for _ in range(mult - 1):
                        km = _mat_mul(_poly_of_matrix(coeffs, sub), km)
                    null = _nullspace(km)
                    newb = [_lin_comb(v, b) for v in null]
                    assert newb
                    new_blocks.append(newb)
            assert sum(len(b) for b in new_blocks) == dim
            blocks = new_blocks
        self.blocks = blocks

    def _classify(self):
        sb = self.sb
        old_rows = []
        f0 = abs(self.disc) if self.disc != 1 else 1
        for M in _divisors(self.N):
            if M == self.N or M % f0 or M < 3:
                continue
            if dim_cusp(M, self.k, None if self.disc == 1 else
                        _sub_char(M, self.disc)) == 0:
                continue
            sub = space_build(M, self.k, self.disc, length=self.L)
            for f in sub.cusp_basis:
                for d in _divisors(self.N // M):
                    row = (_scale_qexp(f, d, self.L) if d > 1
                           else list(f[:self.L]))
                    co = _coords(sb.cusp_basis, sb.cusp_pivots, row)
                    assert co is not None, "old form not inside cusp space"
                    old_rows.append(co)
        obasis, opiv = _echelon(old_rows, sb.dim_cusp) if old_rows else ([], [])
        self.dim_old = len(obasis)
        assert self.dim_old == sb.dim_cusp - sb.dim_new, \
            (self.dim_old, sb.dim_cusp, sb.dim_new)
        new_blocks, old_blocks = [], []
        for b in self.blocks:
            joint = _rank_union(obasis, b, sb.dim_cusp)
            meet = len(obasis) + len(b) - joint
            assert meet in (0, len(b)), "block straddles old/new"
            (old_blocks if meet else new_blocks).append(b)
        assert sum(len(b) for b in new_blocks) == sb.dim_new
        self.new_blocks, self.old_blocks = new_blocks, old_blocks

    # ----- trace vectors and letters -----
    def _block_trace_ops(self, block, n_max):
        """Matrices of T_n restricted to the block for n = 1..n_max."""
        mats = {1: _mat_identity(len(block))}
        base = {p: _restrict_to(block, self.tmat(p))
                for p in _primes(n_max + 1) if p <= n_max}
        for n in range(2, n_max + 1):
            f = factorint(n)
            if len(f) > 1:
                acc = _mat_identity(len(block))
                for p, e in f.items():
                    acc = _mat_mul(acc, mats[p ** e])
                mats[n] = acc
                continue
            (p, e), = f.items()
            if e == 1:
                mats[n] = base[p]
                continue
            if self.N % p == 0:
                mats[n] = _mat_mul(base[p], mats[n // p])
            else:
                scal = kronecker(self.disc, p) * p ** (self.k - 1)
                t = _mat_mul(base[p], mats[n // p])
                prev = mats[n // p // p]
                mats[n] = [[t[i][j] - scal * prev[i][j]
                            for j in range(len(block))]
                           for i in range(len(block))]
        return mats

    def _letters(self, n_max=16):
        keyed = []
        for b in self.new_blocks:
            mats = self._block_trace_ops(b, n_max)
            tr = [len(b)] + [sum(mats[n][i][i] for i in range(len(b)))
                             for n in range(2, n_max + 1)]
            keyed.append((len(b), tr, b))
        keyed.sort(key=lambda t: (t[0], t[1]))
        for i in range(len(keyed) - 1):
            assert keyed[i][:2] != keyed[i + 1][:2], "letter tie unbroken"
        self.ordered_new = [(chr(ord('a') + i), dim, tr, b)
                            for i, (dim, tr, b) in enumerate(keyed)]

    def rational_newform(self, letter):
        """Full q-expansion (length L) of a one-dimensional newform orbit."""
        for lt, dim, _tr, b in self.ordered_new:
            if lt == letter:
                assert dim == 1, "orbit %s is not rational" % letter
                row = _lin_comb(b[0], self.sb.cusp_basis)
                assert row[1] != 0
                c = row[1]
                out = [x / c for x in row]
                for x in out:
                    assert x.denominator == 1, "non-integral eigenform"
                return out
        raise KeyError(letter)


def _unit_coord(i, n):
    return [Fraction(int(j == i)) for j in range(n)]


def _nullspace(mat):
    """Rational nullspace basis (rows) of a square Fraction matrix."""
    n = len(mat)
    rows = [list(r) for r in mat]
    basis, pivots = _echelon(rows, n)
    free = [j for j in range(n) if j not in pivots]
    out = []
    for j in free:
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        for b, p in zip(basis, pivots):
            v[p] = -b[j]
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# fixture generation
# ---------------------------------------------------------------------------

#: rational newform orbits of weight >= 3 shipped as fixtures,
#: label -> (level, weight, character discriminant, orbit letter)
HIGHER_WEIGHT_TARGETS = {
    "5.4.a.a": (5, 4, 1, "a"),
    "6.4.a.a": (6, 4, 1, "a"),
    "8.4.a.a": (8, 4, 1, "a"),
    "9.4.a.a": (9, 4, 1, "a"),
    "10.4.a.a": (10, 4, 1, "a"),
    "12.4.a.a": (12, 4, 1, "a"),
    "18.4.a.a": (18, 4, 1, "a"),
    "24.4.a.a": (24, 4, 1, "a"),
    "36.4.a.a": (36, 4, 1, "a"),
    "50.4.a.b": (50, 4, 1, "b"),
    "50.4.a.d": (50, 4, 1, "d"),
    "72.4.a.b": (72, 4, 1, "b"),
    "4.6.a.a": (4, 6, 1, "a"),
    "6.6.a.a": (6, 6, 1, "a"),
    "8.6.a.a": (8, 6, 1, "a"),
    "36.3.d.b": (36, 3, -4, "b"),
    "20.3.d.a": (20, 3, -20, "a"),
}

#: weight-2 levels shipped as fixtures (all rational orbits at each level)
WEIGHT2_LEVELS = (20, 24, 36, 40, 50, 72, 200)

#: quadratic-twist partners among the shipped labels: (label1, label2, D)
#: meaning a_p(label2) = (D/p) * a_p(label1) for p coprime to both levels
TWIST_PAIRS = (
    ("36.4.a.a", "12.4.a.a", -3),
    ("6.4.a.a", "18.4.a.a", -3),
    ("72.4.a.b", "24.4.a.a", -3),
    ("24.2.a.a", "72.2.a.a", -3),
    ("50.4.a.b", "50.4.a.d", 5),
    ("200.2.a.b", "200.2.a.d", 5),
)


def check_hecke_relations(an, k, level, disc=1, n_max=None):
    """Assert multiplicativity and the p-power recursion for a_1..a_n."""
    n_max = n_max or len(an) - 1
    assert an[1] == 1
    for m in range(2, n_max + 1):
        for n in range(2, n_max // m + 1):
            if gcd(m, n) == 1:
                assert an[m * n] == an[m] * an[n], (m, n)
    for p in _primes(isqrt(n_max)):
        if p * p > n_max:
            break
        if level % p == 0:
            assert an[p * p] == an[p] ** 2, p
        else:
            assert an[p * p] == an[p] ** 2 - kronecker(disc, p) * p ** (k - 1), p
    for p in _primes(n_max + 1):
        if level % p:
            assert an[p] * an[p] <= 4 * p ** (k - 1), \
                "Weil bound violated at %d" % p


def weight2_newforms(level, n_max=200):
    """All rational weight-2 newforms of a level, in orbit-letter order."""
    classes = isogeny_classes(level)
    assert len(classes) == dim_new(level, 2), \
        "incomplete curve search at %d" % level
    forms = []
    for model, bad in classes:
        forms.append([0] + curve_an(model, bad, n_max))
    forms.sort(key=lambda a: a[1:17])
    return forms


def generate_fixtures(n_max=200, verbose=True):
    from .modular_forms import _write_fixture, eta_quotient

    def log(msg):
        if verbose:
            print(msg, flush=True)

    written = {}
    for label in sorted(HIGHER_WEIGHT_TARGETS):
        N, k, disc, letter = HIGHER_WEIGHT_TARGETS[label]
        t0 = time.time()
        cs = CuspSplit(N, k, disc)
        row = cs.rational_newform(letter)
        assert len(row) > n_max
        an = [int(x) for x in row[:n_max + 1]]
        check_hecke_relations(an, k, N, disc)
        _write_fixture(label, k, N, an, "generated:eisenstein-space-split")
        written[label] = an
        log("%-10s  %5.1fs  a_n %s" % (label, time.time() - t0, an[2:8]))
    for level in WEIGHT2_LEVELS:
        t0 = time.time()
        forms = weight2_newforms(level, n_max)
        for i, an in enumerate(forms):
            label = "%d.2.a.%s" % (level, chr(ord("a") + i))
            check_hecke_relations(an, 2, level)
            _write_fixture(label, 2, level, an, "generated:curve-search")
            written[label] = an
        log("level %-4d  %5.1fs  %d weight-2 orbits"
            % (level, time.time() - t0, len(forms)))

    # independent eta-product routes
    def eta_check(label, spec):
        series = eta_quotient(spec, n_max + 1)
        an = written[label]
        for n in range(n_max + 1):
            assert an[n] == series.coeff(n), (label, n)
        log("eta cross-check ok: %s" % label)

    eta_check("6.4.a.a", [(1, 2), (2, 2), (3, 2), (6, 2)])
    eta_check("9.4.a.a", [(3, 8)])
    eta_check("8.4.a.a", [(2, 4), (4, 4)])
    eta_check("4.6.a.a", [(2, 12)])
    eta_check("24.2.a.a", [(2, 1), (4, 1), (6, 1), (12, 1)])
    eta_check("20.2.a.a", [(2, 2), (10, 2)])
    e1 = eta_quotient([(2, 12)], n_max + 1)
    e2 = eta_quotient([(2, 4), (8, 8)], n_max + 1)
    an = written["8.6.a.a"]
    for n in range(n_max + 1):
        assert an[n] == e1.coeff(n) + 32 * e2.coeff(n), n
    log("eta cross-check ok: 8.6.a.a")

    # quadratic-twist partners
    for lab1, lab2, D in TWIST_PAIRS:
        a1, a2 = written[lab1], written[lab2]
        lv = HIGHER_WEIGHT_TARGETS.get(lab1, (int(lab1.split(".")[0]),))[0] \
            * HIGHER_WEIGHT_TARGETS.get(lab2, (int(lab2.split(".")[0]),))[0]
        for p in _primes(n_max + 1):
            if (lv * D) % p == 0:
                continue
            assert a2[p] == kronecker(D, p) * a1[p], (lab1, lab2, p)
        log("twist cross-check ok: %s ~ %s (D=%d)" % (lab1, lab2, D))
    log("wrote %d fixtures" % len(written))
    return written


def main():
    generate_fixtures()


if __name__ == "__main__":
    main()
