"""Finite fields with discrete-log tables, multiplicative characters, and
exact cyclotomic arithmetic.

Values of character sums are kept exactly in Z[zeta_M] (power basis modulo
the M-th cyclotomic polynomial); only Gauss sums, which live in the much
larger ring Z[zeta_{pM}], are handled on a high-precision complex path.

Convention used everywhere: every multiplicative character, including the
trivial one, is extended to 0 by A(0) = 0.  In particular J(eps, eps) over
F_q equals q - 2, not q.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from sympy import isprime
from sympy.polys.specialpolys import cyclotomic_poly


class NotPrime(ValueError):
    pass


class FieldTooLarge(ValueError):
    pass


class NoPrimitivePolynomialFound(RuntimeError):
    pass


class OrderMismatch(ValueError):
    pass


class PrecisionTooLow(ValueError):
    pass


MAX_Q = 1 << 20


# ---------------------------------------------------------------------------
# Z[zeta_M] in the power basis
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cyc_context(M: int):
    """Reduction data for Q(zeta_M): cyclotomic poly coefficients, the
    reduction rows for x^e with deg <= e < 2*deg - 1, and the power basis
    images of zeta^k for 0 <= k < M."""
    if M < 1:
        raise ValueError("root-of-unity order must be positive")
    poly = cyclotomic_poly(M)
    coeffs = [int(c) for c in reversed(poly.as_poly().all_coeffs())]  # c0..c_deg
    deg = len(coeffs) - 1
    # x^deg = -(c0 + c1 x + ... + c_{deg-1} x^{deg-1})   (monic)
    red = []
    cur = [-c for c in coeffs[:deg]]
    red.append(tuple(cur))
    for _ in range(deg - 2):
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [cur[i] + top * red[0][i] for i in range(deg)]
        red.append(tuple(cur))
    # zeta^k in the power basis for k mod M
    zpows = []
    for k in range(M):
        vec = [0] * deg
        if k < deg:
            vec[k] = 1
        else:
            # reduce x^k step by step
            vec = list(zpows[k - 1])
            top = vec[-1]
            vec = [0] + vec[:-1]
            if top:
                vec = [vec[i] + top * red[0][i] for i in range(deg)]
        zpows.append(tuple(vec))
    return deg, tuple(coeffs), tuple(red), tuple(zpows)


class CycInt:
    """Exact element of Z[zeta_M] (or Q(zeta_M) when coefficients are
    Fractions), stored in the power basis 1, zeta, ..., zeta^(phi(M)-1)."""

    __slots__ = ("M", "coeffs")

    def __init__(self, M, coeffs):
        deg, _, _, _ = _cyc_context(M)
        if len(coeffs) != deg:
            raise ValueError("coefficient vector has wrong length")
        self.M = M
        self.coeffs = tuple(coeffs)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, M):
        deg, _, _, _ = _cyc_context(M)
        return cls(M, (0,) * deg)

    @classmethod
    def one(cls, M):
        return cls.from_rational(M, 1)

    @classmethod
    def from_rational(cls, M, a):
        deg, _, _, _ = _cyc_context(M)
        return cls(M, (a,) + (0,) * (deg - 1))

    @classmethod
    def zeta_pow(cls, M, k):
        _, _, _, zpows = _cyc_context(M)
        return cls(M, zpows[k % M])

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        return CycInt(self.M, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return CycInt(self.M, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return CycInt(self.M, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycInt(self.M, tuple(a * other for a in self.coeffs))
        other = self._coerce(other)
        deg, _, red, _ = _cyc_context(self.M)
        a, b = self.coeffs, other.coeffs
        prod = [0] * (2 * deg - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = list(prod[:deg])
        for e in range(deg, 2 * deg - 1):
            c = prod[e]
            if c:
                row = red[e - deg]
                for i in range(deg):
                    if row[i]:
                        out[i] += c * row[i]
        return CycInt(self.M, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycInt.one(self.M)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def mul_zeta(self, k: int):
        """Multiply by zeta_M^k (cheap monomial shift)."""
        return self * CycInt.zeta_pow(self.M, k)

    def inverse(self):
        """Inverse in Q(zeta_M) via extended gcd with the cyclotomic poly."""
        deg, coeffs, _, _ = _cyc_context(self.M)
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_M)")

        def _deg(p):
            for i in range(len(p) - 1, -1, -1):
                if p[i]:
                    return i
            return -1

        def _divmod(num, den):
            num = list(num)
            dd = _deg(den)
            lead = den[dd]
            quo = [Fraction(0)] * (max(_deg(num) - dd, -1) + 1)
            while _deg(num) >= dd:
                sh = _deg(num) - dd
                f = num[_deg(num)] / lead
                quo[sh] = f
                for i in range(dd + 1):
                    num[i + sh] -= f * den[i]
            return quo, num

        def _sub_mul(p, q, f):  # p - f*q
            out = [Fraction(0)] * max(len(p), len(q) + len(f) - 1, 1)
            for i, c in enumerate(p):
                out[i] += c
            for i, ci in enumerate(f):
                if ci:
                    for j, cj in enumerate(q):
                        out[i + j] -= ci * cj
            return out

        # maintain t_i with t_i * self == r_i (mod Phi_M)
        r0 = [Fraction(c) for c in coeffs]
        r1 = [Fraction(c) for c in self.coeffs]
        t0, t1 = [Fraction(0)], [Fraction(1)]
        while _deg(r1) >= 0:
            quo, rem = _divmod(r0, r1)
            r0, r1 = r1, rem
            t0, t1 = t1, _sub_mul(t0, t1, quo)
        if _deg(r0) != 0:
            raise ZeroDivisionError("element not invertible (unexpected)")
        g = r0[0]
        _, inv = _divmod([c / g for c in t0], [Fraction(c) for c in coeffs])
        inv = inv[:deg] + [Fraction(0)] * max(0, deg - len(inv))
        return CycInt(self.M, tuple(inv[:deg]))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(1, 1) / Fraction(other)
            return self * f
        other = self._coerce(other)
        return self * other.inverse()

    # -- structure maps -----------------------------------------------------

    def galois(self, c: int):
        """Apply zeta -> zeta^c (c must be coprime to M)."""
        from math import gcd
        if gcd(c, self.M) != 1:
            raise ValueError("galois exponent must be coprime to M")
        deg, _, _, zpows = _cyc_context(self.M)
        out = CycInt.zero(self.M)
        for i, a in enumerate(self.coeffs):
            if a:
                out = out + CycInt(self.M, zpows[(i * c) % self.M]) * a
        return out

    def conj(self):
        return self.galois(self.M - 1) if self.M > 1 else self

    def embed(self, prec_bits: int = 64):
        """Complex value at zeta_M = exp(2*pi*i/M)."""
        with mpmath.workprec(prec_bits):
            z = mpmath.exp(2j * mpmath.pi / self.M)
            acc = mpmath.mpc(0)
            for i, a in enumerate(self.coeffs):
                if a:
                    acc += mpmath.mpf(a.numerator) / a.denominator * z ** i \
                        if isinstance(a, Fraction) else a * z ** i
            return acc

    def to_rational(self):
        """Return the element as a Fraction; raises if it is not rational."""
        if any(self.coeffs[1:]):
            raise ValueError("element of Q(zeta_M) is not rational: %r" % (self,))
        return Fraction(self.coeffs[0])

    def to_rational_integer(self):
        r = self.to_rational()
        if r.denominator != 1:
            raise ValueError("element is rational but not integral: %s" % r)
        return int(r)

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    # -- misc ---------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycInt):
            if other.M != self.M:
                if other.is_rational():
                    return CycInt.from_rational(self.M, Fraction(other.coeffs[0]))
                if self.M % other.M == 0:
                    return other.lift(self.M)
                raise ValueError("mixed cyclotomic orders %d and %d" % (self.M, other.M))
            return other
        if isinstance(other, (int, Fraction)):
            return CycInt.from_rational(self.M, other)
        raise TypeError("cannot coerce %r" % (other,))

    def lift(self, M2: int):
        """Embed into Q(zeta_M2) for M | M2 (zeta_M = zeta_M2^(M2/M))."""
        if M2 % self.M:
            raise ValueError("no natural map Q(zeta_%d) -> Q(zeta_%d)" % (self.M, M2))
        step = M2 // self.M
        out = CycInt.zero(M2)
        for i, a in enumerate(self.coeffs):
            if a:
                out = out + CycInt.zeta_pow(M2, i * step) * a
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return all(Fraction(a) == Fraction(b) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.M, tuple(Fraction(c) for c in self.coeffs)))

    def __repr__(self):
        return "CycInt(M=%d, %s)" % (self.M, list(self.coeffs))


# ---------------------------------------------------------------------------
# finite fields
# ---------------------------------------------------------------------------

class FiniteFieldTable:
    """F_{p^s} with a fixed generator and full exp/dlog tables.

    Elements are integers:  for s = 1 the residues 0..p-1; for s > 1 the
    base-p encoding c0 + c1*p + ... + c_{s-1}*p^(s-1) of the coordinate
    vector with respect to the fixed defining polynomial.
    """

    def __init__(self, p: int, s: int = 1):
        if not isprime(p):
            raise NotPrime("p = %d is not prime" % p)
        if p == 2:
            raise NotPrime("characteristic 2 is out of scope")
        if s < 1:
            raise ValueError("extension degree must be >= 1")
        q = p ** s
        if q > MAX_Q:
            raise FieldTooLarge("q = %d exceeds 2^20" % q)
        self.p = p
        self.s = s
        self.q = q
        if s == 1:
            self.poly = None
            self.g = self._smallest_primitive_root(p)
            exp = [0] * (q - 1)
            x = 1
            for i in range(q - 1):
                exp[i] = x
                x = (x * self.g) % p
        else:
            self.poly, self.g, exp = self._find_defining_poly(p, s, q)
        self._exp = exp
        dlog = [None] * q
        for i, x in enumerate(exp):
            dlog[x] = i
        self._dlog = dlog
        self._trace = None

    @staticmethod
    def _smallest_primitive_root(p):
        from sympy import factorint
        fac = list(factorint(p - 1))
        for g in range(2, p):
            if all(pow(g, (p - 1) // r, p) != 1 for r in fac):
                return g
        raise NoPrimitivePolynomialFound("no primitive root mod %d" % p)

    @staticmethod
    def _find_defining_poly(p, s, q):
        """Lexicographic search for monic x^s + a_{s-1} x^(s-1) + ... + a_0
        such that the class of x generates the multiplicative group."""
        from sympy import factorint
        prime_divs = list(factorint(q - 1))

        def mul_mod(u, v, red):
            out = [0] * (2 * s - 1)
            for i, ui in enumerate(u):
                if ui:
                    for j, vj in enumerate(v):
                        if vj:
                            out[i + j] = (out[i + j] + ui * vj) % p
            for e in range(2 * s - 2, s - 1, -1):
                c = out[e]
                if c:
                    out[e] = 0
                    for i in range(s):
                        out[e - s + i] = (out[e - s + i] + c * red[i]) % p
            return out[:s]

        def pow_mod(u, n, red):
            result = [1] + [0] * (s - 1)
            base = u[:]
            while n:
                if n & 1:
                    result = mul_mod(result, base, red)
                base = mul_mod(base, base, red)
                n >>= 1
            return result

        one = [1] + [0] * (s - 1)
        xvec = [0, 1] + [0] * (s - 2)
        for code in range(p ** s):
            a = [(code // p ** i) % p for i in range(s)]  # a0..a_{s-1}
            red = [(-ai) % p for ai in a]  # x^s = red polynomial
            if pow_mod(xvec, q - 1, red) != one:
                continue
            if any(pow_mod(xvec, (q - 1) // r, red) == one for r in prime_divs):
                continue
            # x generates => poly irreducible; build exp table
            exp = [0] * (q - 1)
            cur = one[:]
            for i in range(q - 1):
                exp[i] = sum(c * p ** k for k, c in enumerate(cur))
                cur = mul_mod(cur, xvec, red)
            gen = sum(c * p ** k for k, c in enumerate(xvec))
            return tuple(a), gen, exp
        raise NoPrimitivePolynomialFound("no primitive polynomial of degree %d over F_%d" % (s, p))

    # -- element arithmetic -------------------------------------------------

    def decode(self, x):
        p = self.p
        return [(x // p ** i) % p for i in range(self.s)]

    def encode(self, vec):
        return sum((c % self.p) * self.p ** i for i, c in enumerate(vec))

    def add(self, x, y):
        if self.s == 1:
            return (x + y) % self.p
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.s):
            out += ((x + y) % p) * mult
            x //= p
            y //= p
            mult *= p
        return out

    def neg(self, x):
        if self.s == 1:
            return (-x) % self.p
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.s):
            out += ((-x) % p) * mult
            x //= p
            mult *= p
        return out

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if x == 0 or y == 0:
            return 0
        return self._exp[(self._dlog[x] + self._dlog[y]) % (self.q - 1)]

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError
        return self._exp[(-self._dlog[x]) % (self.q - 1)]

    def dlog(self, x):
        if x == 0:
            raise ZeroDivisionError("dlog(0) undefined")
        return self._dlog[x]

    def exp_g(self, k):
        return self._exp[k % (self.q - 1)]

    def from_int(self, n):
        return n % self.p

    def one_minus(self, x):
        return self.sub(self.from_int(1), x)

    def elements(self):
        return range(self.q)

    def trace(self, x):
        """Absolute trace to F_p (as an integer residue)."""
        if self._trace is None:
            tr = [0] * self.q
            if self.s == 1:
                for x_ in range(self.q):
                    tr[x_] = x_
            else:
                # trace(y) = sum of Frobenius images; Frobenius via dlog
                for x_ in range(1, self.q):
                    d = self._dlog[x_]
                    acc = 0
                    for k in range(self.s):
                        acc = self.add(acc, self._exp[(d * self.p ** k) % (self.q - 1)])
                    tr[x_] = acc  # lies in the prime field: encoded value < p
                    assert tr[x_] < self.p
            self._trace = tr
        return self._trace[x]

    def __repr__(self):
        return "FiniteFieldTable(p=%d, s=%d, g=%d)" % (self.p, self.s, self.g)


def build_field(p: int, s: int = 1) -> FiniteFieldTable:
    return FiniteFieldTable(p, s)


# ---------------------------------------------------------------------------
# characters and character sums
# ---------------------------------------------------------------------------

def char_exponent(field: FiniteFieldTable, k: int, M: int) -> int:
    """The integer c with omega^k(x) = zeta_M^(c * dlog x); raises unless
    the order of omega^k divides M and M | q - 1."""
    q1 = field.q - 1
    if q1 % M:
        raise OrderMismatch("M = %d does not divide q - 1 = %d" % (M, q1))
    if (k * M) % q1:
        raise OrderMismatch("character omega^%d has order not dividing %d" % (k, M))
    return (k * M // q1) % M


def char_eval(field: FiniteFieldTable, k: int, x: int, M: int) -> CycInt:
    """omega^k(x) as an exact element of Z[zeta_M]; omega^k(0) = 0."""
    if x == 0:
        return CycInt.zero(M)
    c = char_exponent(field, k, M)
    return CycInt.zeta_pow(M, c * field.dlog(x))


def char_eval_minus_one(field: FiniteFieldTable, k: int, M: int) -> CycInt:
    return char_eval(field, k, field.neg(field.from_int(1)), M)


def jacobi_sum(field: FiniteFieldTable, ka: int, kb: int, M: int) -> CycInt:
    """J(A, B) = sum over x in F_q of A(x) B(1-x), with A(0) = B(0) = 0."""
    ca = char_exponent(field, ka, M)
    cb = char_exponent(field, kb, M)
    counts = [0] * M
    one = field.from_int(1)
    for x in field.elements():
        if x == 0:
            continue
        y = field.sub(one, x)
        if y == 0:
            continue
        e = (ca * field.dlog(x) + cb * field.dlog(y)) % M
        counts[e] += 1
    out = CycInt.zero(M)
    for e, c in enumerate(counts):
        if c:
            out = out + CycInt.zeta_pow(M, e) * c
    return out


def binomial_ff(field: FiniteFieldTable, ka: int, kb: int, M: int) -> CycInt:
    """Finite-field binomial coefficient (A over B) = -B(-1) * J(A, Bbar)."""
    q1 = field.q - 1
    val = jacobi_sum(field, ka, (-kb) % q1, M)
    return -(char_eval_minus_one(field, kb, M) * val)


def gauss_sum(field: FiniteFieldTable, k: int, precision_bits: int = 96):
    """Gauss sum g(omega^k) = sum_{x != 0} omega^k(x) e^(2 pi i Tr(x) / p),
    evaluated on the complex path.  Returns (value, error_bound)."""
    if precision_bits < 64:
        raise PrecisionTooLow("need at least 64 bits")
    q, p, q1 = field.q, field.p, field.q - 1
    with mpmath.workprec(precision_bits):
        zq = [mpmath.exp(2j * mpmath.pi * j / q1) for j in range(q1)]
        zp = [mpmath.exp(2j * mpmath.pi * t / p) for t in range(p)]
        acc = mpmath.mpc(0)
        for x in range(1, q):
            acc += zq[(k * field.dlog(x)) % q1] * zp[field.trace(x) % p]
        err = mpmath.mpf(q) * mpmath.mpf(2) ** (-precision_bits + 8)
        return acc, err
