"""Exact and high-precision classical hypergeometric series.

Series are handled in "datum" convention: the lower parameter list is
given in full (including any entries equal to 1), and

    F(alpha, beta; z) = sum_k  prod_i (a_i)_k / prod_j (b_j)_k * z^k,

so a classical pFq corresponds to appending the implicit (1)_k = k! as an
extra lower parameter.  Truncations, power-series coefficients and
terminating sums are computed exactly over the rationals; infinite sums
at z = 1 carry certified tail bounds.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath as mp


class DenominatorPole(ValueError):
    """A lower parameter reaches a nonpositive integer inside the sum."""


class NotConvergent(ValueError):
    """The infinite series does not converge absolutely at the argument."""


class PrecisionUnreachable(RuntimeError):
    """The requested precision cannot be certified."""


class NonTerminating(ValueError):
    """Exact mode requires a terminating series."""


class GammaPole(ValueError):
    """A Gamma factor is evaluated at a nonpositive integer."""


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class SeriesSpec:
    """Upper/lower parameter lists (datum convention) and argument."""

    upper: tuple
    lower: tuple
    argument: object = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(_frac(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(_frac(b) for b in self.lower))


def pochhammer(a, k):
    """Rising factorial (a)_k, exactly."""
    a = _frac(a)
    out = Fraction(1)
    for j in range(k):
        out *= a + j
    return out


def _terminates_at(upper):
    """Smallest m with an upper parameter equal to -m (else None)."""
    best = None
    for a in upper:
        a = _frac(a)
        if a.denominator == 1 and a <= 0:
            m = -int(a)
            if best is None or m < best:
                best = m
    return best


def hgs_terms(upper, lower, z, n):
    """Terms t_0..t_n of the datum-convention series, exactly."""
    upper = [_frac(a) for a in upper]
    lower = [_frac(b) for b in lower]
    z = _frac(z)
    terms = [Fraction(1)]
    t = Fraction(1)
    for k in range(n):
        num = Fraction(1)
        for a in upper:
            num *= a + k
        den = Fraction(1)
        for b in lower:
            den *= b + k
        if den == 0:
            if num == 0 or t == 0:
                # the series terminated before the pole
                terms.extend([Fraction(0)] * (n - k))
                return terms
            raise DenominatorPole(
                "lower parameter hits %s at k=%d" % (min(lower), k))
        t = t * num / den * z
        terms.append(t)
    return terms


def hgs_truncated(upper, lower, z, n):
    """Partial sum sum_{k=0}^{n} t_k, exactly."""
    return sum(hgs_terms(upper, lower, z, n))


def hgs_coeffs(upper, lower, n):
    """Power-series coefficients in z up to order n (argument left formal)."""
    return hgs_terms(upper, lower, 1, n)


@dataclass
class HGSValue:
    value: object          # mpmath mpf/mpc
    tail_bound: object     # rigorous bound on |value - true sum| (mpf)
    terms_used: int
    accelerated: bool


def hgs_value_at_1(upper, lower, precision=64, max_terms=20000):
    """Value of the series at z = 1 with a certified error bound.

    For terminating series the sum is exact.  Otherwise absolute
    convergence requires delta = sum(lower) - sum(upper) > 0; the direct
    partial sum carries the integral-comparison tail bound

        tail <= t_K * (1 + (K + A + delta) / (delta - 1)),

    valid when sorting both parameter lists gives pairwise nonnegative
    gaps (A = max upper parameter).  When the target precision exceeds
    what direct summation reaches, the returned value is computed by
    adaptive series acceleration at elevated working precision and is
    required to agree with the direct partial sum within the rigorous
    bound; the reported bound is then 2^(-precision).
    """
    upper = [_frac(a) for a in upper]
    lower = [_frac(b) for b in lower]
    m = _terminates_at(upper)
    if m is not None:
        val = hgs_truncated(upper, lower, 1, m)
        with mp.workprec(precision + 8):
            return HGSValue(mp.mpf(val.numerator) / val.denominator,
                            mp.mpf(0), m + 1, False)
    delta = sum(lower) - sum(upper)
    if delta <= 0:
        raise NotConvergent("parameter excess %s <= 0" % delta)
    if delta <= 1:
        raise PrecisionUnreachable(
            "parameter excess %s <= 1: tail not summable by comparison"
            % delta)
    su, sl = sorted(upper), sorted(lower)
    if any(b < a for a, b in zip(su, sl)):
        raise PrecisionUnreachable("parameter lists do not interlace")
    A = max(upper)

    target = mp.mpf(2) ** (-precision)
    with mp.workprec(precision + 48):
        # every per-step factor is a small exact rational, so the floating
        # accumulation carries relative error O(max_terms * 2^-workprec),
        # far below the comparison tail bound tracked here
        partial = mp.mpf(0)
        t = mp.mpf(1)
        K = 0
        tail = mp.inf
        chunk = 64
        while K < max_terms:
            for _ in range(chunk):
                partial += t
                num = Fraction(1)
                for a in upper:
                    num *= a + K
                den = Fraction(1)
                for b in lower:
                    den *= b + K
                t = t * num.numerator * den.denominator / \
                    (num.denominator * den.numerator)
                K += 1
            x0 = mp.mpf(float(K + A + delta))
            tail = abs(t) * (1 + x0 / (mp.mpf(float(delta)) - 1)) + \
                K * mp.mpf(2) ** (-precision - 40) * (abs(partial) + 1)
            if tail <= target:
                return HGSValue(partial, tail, K, False)
            chunk = min(2 * chunk, 8192)
        # acceleration, cross-validated against the rigorous bracket
        val = mp.hyper([(a.numerator, a.denominator) for a in upper]
                       + [(1, 1)],
                       [(b.numerator, b.denominator) for b in lower],
                       1)
        if abs(val - partial) > tail:
            raise PrecisionUnreachable(
                "accelerated value falls outside the certified bracket")
        return HGSValue(val, target, K, True)


@dataclass
class VerificationReport:
    name: str
    passed: bool
    n_cases: int
    details: list

    def summary(self):
        return "%s: %s (%d cases)" % (
            self.name, "pass" if self.passed else "FAIL", self.n_cases)


def gamma_quotient_exact(num_args, den_args):
    """prod Gamma(num) / prod Gamma(den) as an exact rational.

    Works whenever the arguments pair up with integer differences (after
    matching fractional parts); returns None when no such pairing exists.
    Raises GammaPole if a Gamma argument is a nonpositive integer.
    """
    num_args = [_frac(x) for x in num_args]
    den_args = [_frac(x) for x in den_args]
    for x in num_args + den_args:
        if x.denominator == 1 and x <= 0:
            raise GammaPole("Gamma pole at %s" % x)
    rest = list(den_args)
    out = Fraction(1)
    for x in num_args:
        match = None
        for y in rest:
            if (x - y).denominator == 1:
                match = y
                break
        if match is None:
            return None
        rest.remove(match)
        shift = x - match
        if shift >= 0:
            out *= pochhammer(match, int(shift))      # G(x) = (y)_s G(y)
        else:
            out /= pochhammer(x, int(-shift))
    if rest:
        return None
    return out


def whipple_check(a, c, d, e, f, g, mode="terminating_exact",
                  precision=128):
    """Check the classical 7F6 = Gamma-quotient * 4F3 evaluation at 1.

    Left side parameters (pFq convention): upper (a, 1+a/2, c, d, e, f, g),
    lower (a/2, 1+a-c, 1+a-d, 1+a-e, 1+a-f, 1+a-g).  Right side:
    Gamma(1+a-e)Gamma(1+a-f)Gamma(1+a-g)Gamma(1+a-e-f-g) /
    [Gamma(1+a)Gamma(1+a-f-g)Gamma(1+a-e-f)Gamma(1+a-e-g)] times
    4F3(1+a-c-d, e, f, g; e+f+g-a, 1+a-c, 1+a-d) at 1.

    The first upper parameter of the 4F3 reduces to a when c + d = 1,
    the self-dual regime; the general form is used here so the identity
    holds for arbitrary terminating parameters.
    """
    a, c, d, e, f, g = (_frac(x) for x in (a, c, d, e, f, g))
    up7 = [a, 1 + a / 2, c, d, e, f, g]
    lo7 = [a / 2, 1 + a - c, 1 + a - d, 1 + a - e, 1 + a - f, 1 + a - g, 1]
    up4 = [1 + a - c - d, e, f, g]
    lo4 = [e + f + g - a, 1 + a - c, 1 + a - d, 1]
    gnum = [1 + a - e, 1 + a - f, 1 + a - g, 1 + a - e - f - g]
    gden = [1 + a, 1 + a - f - g, 1 + a - e - f, 1 + a - e - g]
    if mode == "terminating_exact":
        m = _terminates_at(up7)
        m4 = _terminates_at(up4)
        if m is None or m4 is None:
            raise NonTerminating("exact mode requires terminating sums")
        lhs = hgs_truncated(up7, lo7, 1, m)
        cq = gamma_quotient_exact(gnum, gden)
        if cq is None:
            raise GammaPole("Gamma quotient is not an exact rational here")
        rhs = cq * hgs_truncated(up4, lo4, 1, m4)
        return VerificationReport("whipple_exact", lhs == rhs, 1,
                                  [("lhs", lhs), ("rhs", rhs), ("C", cq)])
    if mode != "numeric":
        raise ValueError("unknown mode %r" % mode)
    with mp.workprec(precision):
        hl = hgs_value_at_1(up7, lo7, precision - 16)
        cq = gamma_quotient_exact(gnum, gden)
        if cq is not None:
            cval = mp.mpf(cq.numerator) / cq.denominator
        else:
            cval = mp.gammaprod(
                [mp.mpf(x.numerator) / x.denominator for x in gnum],
                [mp.mpf(x.numerator) / x.denominator for x in gden])
        hr = hgs_value_at_1(up4, lo4, precision - 16)
        rhs = cval * hr.value
        err = hl.tail_bound + abs(cval) * hr.tail_bound + \
            mp.mpf(2) ** (-(precision - 24))
        ok = abs(hl.value - rhs) <= err
        return VerificationReport("whipple_numeric", bool(ok), 1,
                                  [("lhs", hl.value), ("rhs", rhs),
                                   ("err", err)])


def whipple2_check(c, f, p_param, precision=256):
    """The self-dual specialization a=1/2, d=1-c, g=1-f, e=(1-p)/2.

    Both sides terminate for odd p_param >= 1, so this is an exact
    rational identity; the constant is
    C = Gamma(p/2)^2 Gamma(3/2-f) Gamma(1/2+f) /
        [Gamma(1/2)^2 Gamma(1+p/2-f) Gamma(p/2+f)].
    """
    c, f = _frac(c), _frac(f)
    p = int(p_param)
    if p < 1 or p % 2 == 0:
        raise ValueError("p_param must be an odd positive integer")
    half = Fraction(1, 2)
    e = Fraction(1 - p, 2)
    up7 = [half, Fraction(5, 4), c, 1 - c, e, f, 1 - f]
    lo7 = [Fraction(1, 4), Fraction(3, 2) - c, half + c, 1 + Fraction(p, 2),
           Fraction(3, 2) - f, half + f, 1]
    up4 = [half, e, f, 1 - f]
    lo4 = [1 - Fraction(p, 2), Fraction(3, 2) - c, half + c, 1]
    cq = gamma_quotient_exact(
        [Fraction(p, 2), Fraction(p, 2), Fraction(3, 2) - f, half + f],
        [half, half, 1 + Fraction(p, 2) - f, Fraction(p, 2) + f])
    if cq is None:
        raise GammaPole("constant is not an exact rational")
    m = _terminates_at(up7)
    lhs = hgs_truncated(up7, lo7, 1, m)
    rhs = cq * p * hgs_truncated(up4, lo4, 1, _terminates_at(up4))
    exact_ok = lhs == rhs
    with mp.workprec(precision):
        delta = abs(mp.mpf((lhs - rhs).numerator) /
                    max(1, (lhs - rhs).denominator))
        ok = exact_ok and delta <= mp.mpf(2) ** (-precision + 40)
    return VerificationReport("whipple2(%s,%s;p=%d)" % (c, f, p), ok, 1,
                              [("lhs", lhs), ("rhs", rhs), ("C", cq)])


def _series_mul(a, b, n):
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a[:n + 1]):
        if x:
            for j, y in enumerate(b[:n + 1 - i]):
                if y:
                    out[i + j] += x * y
    return out


def clausen_check(a, b, truncation):
    """Both classical product formulas, as exact series in x.

    (i)  2F1(a,b;a+b+1/2;x)^2
           = 3F2(2a,2b,a+b; 2a+2b, a+b+1/2; x)
    (ii) 2F1(a,b;a+b+1/2;x) * 2F1(1/2-a,1/2-b;3/2-a-b;x)
           = 3F2(1/2, a-b+1/2, b-a+1/2; a+b+1/2, 3/2-a-b; x)
    """
    a, b = _frac(a), _frac(b)
    n = int(truncation)
    half = Fraction(1, 2)
    f1 = hgs_coeffs([a, b], [a + b + half, 1], n)
    lhs1 = _series_mul(f1, f1, n)
    rhs1 = hgs_coeffs([2 * a, 2 * b, a + b], [2 * a + 2 * b, a + b + half, 1],
                      n)
    f2 = hgs_coeffs([half - a, half - b], [Fraction(3, 2) - a - b, 1], n)
    lhs2 = _series_mul(f1, f2, n)
    rhs2 = hgs_coeffs([half, a - b + half, b - a + half],
                      [a + b + half, Fraction(3, 2) - a - b, 1], n)
    ok1 = lhs1 == rhs1[:n + 1]
    ok2 = lhs2 == rhs2[:n + 1]
    return VerificationReport("clausen(a=%s,b=%s)" % (a, b), ok1 and ok2,
                              2 * (n + 1),
                              [("square_identity", ok1),
                               ("product_identity", ok2)])


def _series_inv(a, n):
    assert a[0] != 0
    out = [Fraction(0)] * (n + 1)
    out[0] = 1 / a[0]
    for m in range(1, n + 1):
        s = Fraction(0)
        for j in range(1, min(m, len(a) - 1) + 1):
            s += a[j] * out[m - j]
        out[m] = -s / a[0]
    return out


def _series_pow_frac(a, exponent, n):
    """(1 + u)^e for a series a with a[0] = 1, exponent rational."""
    assert a[0] == 1
    e = _frac(exponent)
    out = [Fraction(1)] + [Fraction(0)] * n
    # d/dx (A^e) * A = e * A' * A^e  => (m) c_m = sum ...
    ap = [j * a[j] for j in range(1, len(a))] + [Fraction(0)]
    for m in range(1, n + 1):
        s = Fraction(0)
        for j in range(1, min(m, len(a) - 1) + 1):
            s += (e * j - (m - j)) * a[j] * out[m - j]
        out[m] = s / m
    return out


def _series_compose(f, u, n):
    """f(u(x)) to order n, requiring u(0) = 0."""
    assert u[0] == 0
    out = [Fraction(0)] * (n + 1)
    out[0] = f[0]
    upow = [Fraction(1)] + [Fraction(0)] * n
    for k in range(1, len(f)):
        upow = _series_mul(upow, u, n)
        if all(x == 0 for x in upow):
            break
        c = f[k]
        if c:
            for i in range(n + 1):
                out[i] += c * upow[i]
    return out


def lemma_233_check(order):
    """3F2(1/2,1/6,5/6; 4/3,2/3; x(x+4)^3 / (4(2x-1)^3))
    equals 4 (1-2x)^(1/2) / (4+x) as a power series in x."""
    n = int(order)
    num = [Fraction(0), Fraction(64), Fraction(48), Fraction(12),
           Fraction(1)]  # x(x+4)^3
    den = [Fraction(c) for c in (-4, 24, -48, 32)]  # 4(2x-1)^3
    u = _series_mul(num, _series_inv(den, n), n)[:n + 1]
    f = hgs_coeffs([Fraction(1, 2), Fraction(1, 6), Fraction(5, 6)],
                   [Fraction(4, 3), Fraction(2, 3), 1], n)
    lhs = _series_compose(f, u, n)
    sq = _series_pow_frac([Fraction(1), Fraction(-2)] + [Fraction(0)] * n,
                          Fraction(1, 2), n)
    rhs = _series_mul(sq, _series_inv([Fraction(4), Fraction(1)], n), n)
    rhs = [4 * x for x in rhs[:n + 1]]
    ok = lhs == rhs
    return VerificationReport("hauptmodul_3F2_series", ok, n + 1,
                              [("lhs", lhs[:6]), ("rhs", rhs[:6])])


def length6_datum(c, f):
    """Upper/lower lists of the length-6 datum attached to a pair (c, f)."""
    c, f = _frac(c), _frac(f)
    half = Fraction(1, 2)
    upper = (half, c, 1 - c, half, f, 1 - f)
    lower = (Fraction(1), Fraction(3, 2) - c, half + c, Fraction(1),
             Fraction(3, 2) - f, half + f)
    return upper, lower


def seven_f_six_coeffs(c, f, n):
    """Coefficients of the balanced 7F6(lambda) attached to (c, f).

    Relative to the length-6 series F(lambda) the extra column inserts
    (5/4)_k / (1/4)_k = 1 + 4k, so the function equals
    4*lambda*F'(lambda) + F(lambda); here it is expanded directly from
    the full parameter lists.
    """
    base_upper, base_lower = length6_datum(c, f)
    upper = [Fraction(5, 4)] + list(base_upper)
    lower = [Fraction(1, 4)] + list(base_lower)
    return hgs_coeffs(upper, lower, n)
