"""Hypergeometric data: multiset pairs (alpha, beta), Galois-orbit
predicates, the e-profile (weight / twist combinatorics), gamma vectors for
the Gauss-sum expression of H_q, and the Whipple family constructors."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from sympy import Poly, Symbol, mobius
from sympy.polys.specialpolys import cyclotomic_poly


class BadBeta1(ValueError):
    pass


class ZeroLambda(ValueError):
    pass


class NotDefinedOverQ(ValueError):
    pass


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def lcd(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out


@dataclass(frozen=True)
class HGDatum:
    """A hypergeometric datum {alpha, beta; lambda}.

    Entries are kept in the order and form given (e.g. 13/10 stays 13/10
    for display); predicates work with the reductions mod Z.
    """

    alpha: tuple
    beta: tuple
    lam: Fraction

    def __post_init__(self):
        alpha = tuple(Fraction(a) for a in self.alpha)
        beta = tuple(Fraction(b) for b in self.beta)
        if not alpha or len(alpha) != len(beta):
            raise ValueError("alpha and beta must be nonempty lists of equal length")
        if beta[0].denominator != 1:
            raise BadBeta1("first entry of beta must be an integer (normalized to 1)")
        lam = Fraction(self.lam)
        if lam == 0:
            raise ZeroLambda("lambda must be nonzero")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "lam", lam)

    # -- basic attributes ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def M(self) -> int:
        return lcd(self.alpha + self.beta)

    @property
    def m_integral_beta(self) -> int:
        return sum(1 for b in self.beta if b.denominator == 1)

    def columns_mod1(self):
        return tuple((_mod1(a), _mod1(b)) for a, b in zip(self.alpha, self.beta))

    def _scaled_columns(self, c: int):
        return tuple(sorted((_mod1(c * a), _mod1(c * b)) for a, b in zip(self.alpha, self.beta)))

    def congruent_under(self, c: int) -> bool:
        """True if c.(alpha, beta) is congruent to (alpha, beta) mod Z, as
        multisets of column vectors."""
        return self._scaled_columns(c) == self._scaled_columns(1)

    # -- orbit predicates ---------------------------------------------------

    @property
    def is_primitive(self) -> bool:
        return all((a - b).denominator != 1 for a in self.alpha for b in self.beta)

    @property
    def is_self_dual(self) -> bool:
        return self.congruent_under(-1)

    @property
    def is_defined_over_Q(self) -> bool:
        M = self.M
        return self.lam.denominator >= 1 and all(
            self.congruent_under(c) for c in range(1, M + 1) if gcd(c, M) == 1
        )

    @property
    def is_defined_over_Q_unordered(self) -> bool:
        """Pairing-independent variant: alpha and beta are separately unions
        of full Galois orbits mod Z (what the Gauss-sum expression of H_q
        and the e-profile combinatorics need, both being order-independent)."""
        try:
            _cyclotomic_multiset(self.alpha)
            _cyclotomic_multiset(self.beta)
        except NotDefinedOverQ:
            return False
        return True

    def orbit_predicates(self) -> dict:
        return {
            "is_primitive": self.is_primitive,
            "is_self_dual": self.is_self_dual,
            "is_defined_over_Q": self.is_defined_over_Q,
        }

    def scaled(self, c: int) -> "HGDatum":
        return HGDatum(
            tuple(_mod1(c * a) for a in self.alpha),
            (Fraction(1),) + tuple(_mod1(c * b) for b in self.beta[1:]),
            self.lam,
        )

    def __repr__(self):
        return "HGDatum(alpha=%s, beta=%s, lambda=%s)" % (
            [str(a) for a in self.alpha], [str(b) for b in self.beta], self.lam)


def new_datum(alpha, beta, lam) -> HGDatum:
    return HGDatum(tuple(Fraction(a) for a in alpha),
                   tuple(Fraction(b) for b in beta), Fraction(lam))


# ---------------------------------------------------------------------------
# e-profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EProfile:
    breakpoints: tuple        # sorted x-values where the step function may jump
    values: tuple             # value on [breakpoints[i], breakpoints[i+1])
    min_e: Fraction
    max_e: Fraction
    weight: Fraction
    twist: Fraction | None    # None when the datum is not defined over Q
    m: int
    n: int


def e_step(datum: HGDatum, x: Fraction) -> int:
    """The step function sum(-floor(a_i - x) - floor(x + b_i)) with the
    entries reduced to [0, 1)."""
    x = Fraction(x)
    total = 0
    for a, b in datum.columns_mod1():
        da = a - x
        total -= da.numerator // da.denominator
        db = x + b
        total -= db.numerator // db.denominator
    return total


def e_profile(datum: HGDatum) -> EProfile:
    pts = sorted({_mod1(a) for a in datum.alpha} |
                 {_mod1(1 - b) for b in datum.beta} | {Fraction(0)})
    # the function is constant between consecutive jump points; sample each
    # half-open interval at its left endpoint (jumps at a_i happen just
    # after a_i, so also sample midpoints)
    samples = list(pts)
    for i in range(len(pts)):
        right = pts[i + 1] if i + 1 < len(pts) else Fraction(1)
        samples.append((pts[i] + right) / 2)
    values = tuple(e_step(datum, x) for x in samples)
    min_e, max_e = min(values), max(values)
    m = datum.m_integral_beta
    n = datum.n
    twist = None
    if datum.is_defined_over_Q_unordered:
        twist = -min_e - Fraction(n - m, 2)
    interval_vals = tuple(e_step(datum, (pts[i] + (pts[i + 1] if i + 1 < len(pts) else Fraction(1))) / 2)
                          for i in range(len(pts)))
    return EProfile(tuple(pts), interval_vals, Fraction(min_e), Fraction(max_e),
                    Fraction(max_e - min_e), twist, m, n)


# ---------------------------------------------------------------------------
# gamma vectors (cyclotomic presentation of the pair)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaVector:
    plist: tuple
    qlist: tuple
    N_const: Fraction

    def s_multiplicity(self, m: int, group_order: int) -> int:
        """Multiplicity of X - e^(2 pi i m / group_order) in
        gcd(prod(X^p - 1), prod(X^q - 1))."""
        cnt_p = sum(1 for p in self.plist if (m * p) % group_order == 0)
        cnt_q = sum(1 for q in self.qlist if (m * q) % group_order == 0)
        return min(cnt_p, cnt_q)


def _cyclotomic_multiset(entries) -> dict:
    """Decompose a multiset of rationals in [0,1) into full Galois orbits
    {k/d : gcd(k,d)=1}; returns {d: multiplicity}."""
    counts = {}
    for x in entries:
        x = _mod1(Fraction(x))
        counts[x] = counts.get(x, 0) + 1
    orbits = {}
    while counts:
        x = next(iter(counts))
        d = x.denominator if x != 0 else 1
        orbit = [Fraction(k, d) for k in range(d) if gcd(k, d) == 1] if d > 1 else [Fraction(0)]
        mult = min(counts.get(y, 0) for y in orbit)
        if mult == 0:
            raise NotDefinedOverQ("entries do not form full Galois orbits (denominator %d)" % d)
        for y in orbit:
            counts[y] -= mult
            if counts[y] == 0:
                del counts[y]
        orbits[d] = orbits.get(d, 0) + mult
    return orbits


def gamma_vector(datum: HGDatum, verify: bool = True) -> GammaVector:
    if not datum.is_defined_over_Q_unordered:
        raise NotDefinedOverQ("gamma vector requires a pair defined over Q")
    a_orbits = _cyclotomic_multiset(datum.alpha)
    b_orbits = _cyclotomic_multiset(datum.beta)
    # Phi_d = prod_{e | d} (X^e - 1)^(mu(d/e))
    exps: dict[int, int] = {}
    for orbits, sign in ((a_orbits, 1), (b_orbits, -1)):
        for d, mult in orbits.items():
            for e in range(1, d + 1):
                if d % e == 0:
                    mu = int(mobius(d // e))
                    if mu:
                        exps[e] = exps.get(e, 0) + sign * mult * mu
    plist, qlist = [], []
    for e, c in sorted(exps.items()):
        if c > 0:
            plist += [e] * c
        elif c < 0:
            qlist += [e] * (-c)
    N = Fraction((-1) ** sum(qlist))
    for p in plist:
        N *= Fraction(p) ** p
    for q in qlist:
        N /= Fraction(q) ** q
    gv = GammaVector(tuple(plist), tuple(qlist), N)
    if verify:
        _verify_gamma_vector(datum, gv, a_orbits, b_orbits)
    return gv


def _verify_gamma_vector(datum, gv, a_orbits, b_orbits):
    X = Symbol("X")
    lhs = Poly(1, X)
    for d, mult in a_orbits.items():
        lhs *= Poly(cyclotomic_poly(d, X), X) ** mult
    for q in gv.qlist:
        lhs *= Poly(X ** q - 1, X)
    rhs = Poly(1, X)
    for d, mult in b_orbits.items():
        rhs *= Poly(cyclotomic_poly(d, X), X) ** mult
    for p in gv.plist:
        rhs *= Poly(X ** p - 1, X)
    if lhs != rhs:
        raise AssertionError("gamma vector does not reproduce the cyclotomic quotient")


# ---------------------------------------------------------------------------
# the Whipple family
# ---------------------------------------------------------------------------

WHIPPLE_PAIRS = (
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(1, 3)),
    (Fraction(1, 2), Fraction(1, 6)),
    (Fraction(1, 3), Fraction(1, 3)),
    (Fraction(1, 6), Fraction(1, 6)),
    (Fraction(1, 5), Fraction(2, 5)),
    (Fraction(1, 10), Fraction(3, 10)),
)

# the five pairs whose length-4 datum is defined over Q
WHIPPLE_PAIRS_OVER_Q = WHIPPLE_PAIRS[:5]


def whipple_family(c, f, allow_any: bool = False) -> dict:
    c, f = Fraction(c), Fraction(f)
    known = (c, f) in WHIPPLE_PAIRS or (f, c) in WHIPPLE_PAIRS
    if not known and not allow_any:
        raise ValueError("(%s, %s) is not one of the seven standard pairs; "
                         "pass allow_any=True for experiments" % (c, f))
    half = Fraction(1, 2)
    hd1 = new_datum(
        (half, c, 1 - c, half, f, 1 - f),
        (1, Fraction(3, 2) - c, half + c, 1, Fraction(3, 2) - f, half + f),
        1)
    hd2 = new_datum(
        (half, half, f, 1 - f),
        (1, 1, Fraction(3, 2) - c, half + c),
        1)
    hd3 = new_datum(
        (half, f, 1 - f),
        (1, Fraction(3, 2) - c, half + c),
        1)
    alpha2 = (Fraction(1 + 2 * f - 2 * c, 4), Fraction(3 - 2 * f - 2 * c, 4))
    beta2 = (Fraction(1), Fraction(3, 2) - c)
    M = hd1.M
    N = lcd(alpha2 + beta2)
    if (c, f) in WHIPPLE_PAIRS:
        # the N = 2M relation holds in the standard orientation only
        expected = M if (c, f) == (Fraction(1, 2), Fraction(1, 3)) else 2 * M
        assert N == expected, "N(c,f) = %d but expected %d" % (N, expected)
    return {"HD1": hd1, "HD2": hd2, "HD3": hd3,
            "alpha2": alpha2, "beta2": beta2, "M": M, "N": N,
            "is_standard_pair": known}


# ---------------------------------------------------------------------------
# CLI text format
# ---------------------------------------------------------------------------

_PRESET_RE = re.compile(r"^HD([123])\(\s*([0-9/+-]+)\s*,\s*([0-9/+-]+)\s*\)$")


def parse_datum(text: str) -> HGDatum:
    """Parse `alpha=1/2,1/2 beta=1,1 lambda=1` or a preset `HD2(1/2,1/3)`."""
    text = text.strip()
    m = _PRESET_RE.match(text)
    if m:
        which, c, f = m.groups()
        fam = whipple_family(Fraction(c), Fraction(f), allow_any=True)
        return fam["HD" + which]
    parts = dict()
    for tok in text.split():
        if "=" not in tok:
            raise ValueError("cannot parse datum token %r" % tok)
        key, val = tok.split("=", 1)
        parts[key] = val
    missing = {"alpha", "beta", "lambda"} - set(parts)
    if missing:
        raise ValueError("datum text is missing %s" % ", ".join(sorted(missing)))
    alpha = [Fraction(x) for x in parts["alpha"].split(",")]
    beta = [Fraction(x) for x in parts["beta"].split(",")]
    return new_datum(alpha, beta, Fraction(parts["lambda"]))
