"""Dirichlet characters mod N, character-orbit labels, dimension formulas
for spaces of cusp forms, and Eisenstein q-expansions for real characters."""

from fractions import Fraction
from math import gcd

from sympy import bernoulli as _bernoulli_poly
from sympy import factorint, primitive_root, Rational


def kronecker(a, n):
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # factor out 2s from n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi symbol by reciprocity
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a, n = n % a, a
    return sign * result if n == 1 else 0


# ---------------------------------------------------------------------------
# the character group mod N
# ---------------------------------------------------------------------------

def _unit_group(N):
    """Generators and orders of (Z/N)^* via CRT over prime powers."""
    gens = []  # list of (generator lifted mod N, order)
    if N == 1:
        return gens
    fac = factorint(N)
    for p, r in sorted(fac.items()):
        q = p ** r
        rest = N // q
        def lift(g, q=q, rest=rest):
            # element congruent to g mod q and 1 mod rest
            if rest == 1:
                return g % N
            # CRT
            inv = pow(q, -1, rest)
            return (g + q * ((1 - g) * inv % rest)) % N
        if p == 2:
            if r == 1:
                continue
            gens.append((lift(q - 1), 2))
            if r >= 3:
                gens.append((lift(5), q // 4))
        else:
            g = primitive_root(q)
            gens.append((lift(int(g)), q - q // p))
    return gens


class DirichletChar:
    """A character mod N given by exponents on the unit-group generators."""

    def __init__(self, group, exps):
        self.group = group
        self.exps = tuple(e % o for e, (_, o) in zip(exps, group.gens))
        # the order of the character
        m = 1
        for e, (_, o) in zip(self.exps, group.gens):
            if e:
                m = m * (o // gcd(e, o)) // gcd(m, o // gcd(e, o))
        self.order = m

    def _log_value(self, n):
        """chi(n) = zeta_order^e; return e, or None when gcd(n, N) > 1."""
        N = self.group.N
        n %= N
        if N > 1 and gcd(n, N) != 1:
            return None
        e = 0
        for (g, o), exp in zip(self.group.gens, self.exps):
            if exp:
                d = self.group.dlog(n, g, o)
                # zeta_o^(exp*d) = zeta_order^(exp*d*order/o); the division
                # is exact because order is a multiple of o/gcd(exp, o)
                e += exp * d * self.order // o
        return e % self.order

    def __call__(self, n):
        """Value for real characters as an integer in {-1, 0, 1}."""
        if self.order > 2:
            raise ValueError("non-real character; use trace or log form")
        e = self._log_value(n)
        if e is None:
            return 0
        return -1 if e else 1

    def trace(self, n):
        """Trace of chi(n) from Q(zeta_order) to Q (Ramanujan sum)."""
        e = self._log_value(n)
        if e is None:
            return 0
        m = self.order
        g = gcd(e, m)
        d = m // g
        # sum of primitive d-th roots of unity times phi(m)/phi(d)
        from sympy import mobius, totient
        return int(mobius(d)) * int(totient(m)) // int(totient(d))

    @property
    def parity(self):
        """chi(-1)."""
        if self.group.N <= 2:
            return 1
        e = self._log_value(self.group.N - 1)
        return -1 if e else 1

    @property
    def conductor(self):
        N = self.group.N
        for f in sorted(d for d in range(1, N + 1) if N % d == 0):
            ok = True
            for n in range(1, N):
                if n % f == 1 % f and gcd(n, N) == 1:
                    if self._log_value(n):
                        ok = False
                        break
            if ok:
                return f
        return N

    def value_at(self, n, modulus=None):
        """Value of the primitive character inducing chi, at any modulus.

        Real characters only; modulus defaults to N.
        """
        if self.order > 2:
            raise ValueError("non-real character")
        modulus = self.group.N if modulus is None else modulus
        f = self.conductor
        if gcd(n, modulus) != 1:
            return 0
        # lift n to a residue coprime to N congruent to n mod f
        N = self.group.N
        cand = n % f if f > 1 else 1
        while gcd(cand, N) != 1:
            cand += f
        return self(cand)

    def discriminant(self):
        """Kronecker discriminant D with chi = (D|.) for quadratic chi."""
        if self.order > 2:
            raise ValueError("not quadratic")
        if self.order == 1:
            return 1
        f = self.conductor
        for D in (f, -f):
            if _is_fundamental(D) and all(
                    self.value_at(n) == kronecker(D, n)
                    for n in range(1, self.group.N + 1)
                    if gcd(n, self.group.N) == 1):
                return D
        raise AssertionError("no Kronecker discriminant found")

    def __eq__(self, other):
        return self.group.N == other.group.N and self.exps == other.exps

    def __hash__(self):
        return hash((self.group.N, self.exps))


def _is_fundamental(D):
    """True when D is 1 or a fundamental quadratic discriminant."""
    if D == 1:
        return True
    def squarefree(m):
        m = abs(m)
        d = 2
        while d * d <= m:
            if m % (d * d) == 0:
                return False
            d += 1
        return True
    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


class CharGroup:
    """All Dirichlet characters mod N with LMFDB-style orbit letters."""

    def __init__(self, N):
        self.N = N
        self.gens = _unit_group(N)
        self._dlogs = {}

    def dlog(self, n, g, o):
        key = (g, o)
        table = self._dlogs.get(key)
        if table is None:
            table = {}
            x = 1
            for j in range(o):
                table.setdefault(x, j)
                x = x * g % self.N
            self._dlogs[key] = table
        # decompose n over all generators jointly (search, N is small)
        return self._joint_dlog(n)[key]

    def _joint_dlog(self, n):
        cache = self._dlogs.setdefault("joint", {})
        if n in cache:
            return cache[n]
        # brute-force decomposition over the generator lattice
        from itertools import product
        ranges = [range(o) for _, o in self.gens]
        for exps in product(*ranges):
            x = 1
            for (g, o), e in zip(self.gens, exps):
                x = x * pow(g, e, self.N) % self.N
            if x == n % self.N:
                result = {(g, o): e for (g, o), e in zip(self.gens, exps)}
                cache[n] = result
                return result
        raise ValueError("%d not a unit mod %d" % (n, self.N))

    def characters(self):
        from itertools import product
        ranges = [range(o) for _, o in self.gens]
        return [DirichletChar(self, exps) for exps in product(*ranges)]

    def trivial(self):
        return DirichletChar(self, [0] * len(self.gens))

    def orbits(self):
        """Galois orbits sorted the LMFDB way: by order, then trace vector."""
        chars = self.characters()
        seen = set()
        orbits = []
        for chi in chars:
            if chi.exps in seen:
                continue
            orbit = []
            m = chi.order
            for j in range(1, m + 1):
                if gcd(j, m) == 1:
                    tw = DirichletChar(self,
                                       [e * j for e in chi.exps])
                    if tw.exps not in {c.exps for c in orbit}:
                        orbit.append(tw)
            for c in orbit:
                seen.add(c.exps)
            trace_vec = tuple(orbit[0].trace(n)
                              for n in range(1, self.N + 1))
            orbits.append((chi.order, trace_vec, orbit))
        orbits.sort(key=lambda rec: (rec[0], rec[1]))
        return orbits

    def orbit_letter(self, chi):
        for i, (_, _, orbit) in enumerate(self.orbits()):
            if any(c.exps == chi.exps for c in orbit):
                return _letter_code(i)
        raise ValueError("character not found")

    def orbit_by_letter(self, letter):
        orbits = self.orbits()
        idx = _letter_index(letter)
        if idx >= len(orbits):
            raise ValueError("no orbit %s mod %d" % (letter, self.N))
        return orbits[idx][2]


def _letter_code(i):
    """0 -> a, ..., 25 -> z, 26 -> ba, 27 -> bb, ... (LMFDB scheme)."""
    if i < 26:
        return chr(97 + i)
    out = ""
    while i:
        out = chr(97 + i % 26) + out
        i //= 26
    return out


def _letter_index(s):
    i = 0
    for ch in s:
        i = 26 * i + (ord(ch) - 97)
    return i


# ---------------------------------------------------------------------------
# dimension formulas
# ---------------------------------------------------------------------------

def _mu0(N):
    out = N
    for p in factorint(N):
        out += out // p
    return out


def dim_cusp(N, k, chi=None):
    """dim S_k(Gamma_0(N), chi) for k >= 2 and real chi (Cohen-Oesterle)."""
    if chi is None:
        chi = CharGroup(N).trivial()
    if chi.order > 2:
        raise ValueError("only real characters are supported")
    if k < 2 or chi.parity != (-1) ** k:
        return 0
    f = chi.conductor
    lam = 1
    for p, r in factorint(N).items():
        s = 0
        ff = f
        while ff % p == 0:
            ff //= p
            s += 1
        if 2 * s <= r:
            lam *= (p ** (r // 2) + p ** (r // 2 - 1)) if r % 2 == 0 \
                else 2 * p ** ((r - 1) // 2)
        else:
            lam *= 2 * p ** (r - s)
    if k % 4 == 2:
        g4 = Fraction(-1, 4)
    elif k % 4 == 0:
        g4 = Fraction(1, 4)
    else:
        g4 = Fraction(0)
    if k % 3 == 2:
        g3 = Fraction(-1, 3)
    elif k % 3 == 0:
        g3 = Fraction(1, 3)
    else:
        g3 = Fraction(0)
    e4 = sum(chi.value_at(x) for x in range(N) if (x * x + 1) % N == 0)
    e3 = sum(chi.value_at(x) for x in range(N) if (x * x + x + 1) % N == 0)
    dim = Fraction(k - 1, 12) * _mu0(N) - Fraction(lam, 2) \
        + g4 * e4 + g3 * e3
    # correction dim M_{2-k}: only k = 2 with trivial chi has constants
    if k == 2 and chi.order == 1:
        dim += 1
    assert dim.denominator == 1, (N, k, dim)
    return max(0, int(dim))


def genus_gamma0(N):
    """Genus of X_0(N) by the classical formula (independent cross-check)."""
    mu = _mu0(N)
    nu2 = 0 if N % 4 == 0 else _mult_prod(
        N, lambda p: 1 if p == 2 else 1 + kronecker(-1, p))
    nu3 = 0 if N % 9 == 0 else _mult_prod(
        N, lambda p: 1 if p == 3 else 1 + kronecker(-3, p))
    cusps = sum(_phi(gcd(d, N // d)) for d in _divisors(N))
    g = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) \
        - Fraction(cusps, 2)
    assert g.denominator == 1
    return int(g)


def _mult_prod(N, f):
    out = 1
    for p in factorint(N):
        out *= f(p)
    return out


def _phi(n):
    out = n
    for p in factorint(n):
        out -= out // p
    return out


def _divisors(N):
    return [d for d in range(1, N + 1) if N % d == 0]


def dim_new(N, k, chi=None):
    """dim of the new subspace, by Moebius inversion over levels."""
    f = 1 if chi is None else chi.conductor
    total = 0
    for d in _divisors(N // f):
        mu2 = 1
        for p, r in factorint(d).items():
            if r == 1:
                mu2 *= -2
            elif r == 2:
                mu2 *= 1
            else:
                mu2 = 0
        if mu2 == 0:
            continue
        M = N // d
        chi_M = None
        if chi is not None:
            chi_M = _restrict(chi, M)
        total += mu2 * dim_cusp(M, k, chi_M)
    return total


def _restrict(chi, M):
    """chi (conductor dividing M) viewed as a character mod M."""
    grp = CharGroup(M)
    for cand in grp.characters():
        if cand.order != chi.order:
            continue
        if all(cand.value_at(n) == chi.value_at(n, M)
               for n in range(1, M + 1) if gcd(n, M) == 1) \
                and chi.order <= 2:
            return cand
    raise ValueError("no restriction found")


# ---------------------------------------------------------------------------
# Eisenstein q-expansions (real characters, given by discriminants)
# ---------------------------------------------------------------------------

def bernoulli_chi(k, D):
    """Generalized Bernoulli number B_{k,chi} for chi = (D|.)."""
    f = abs(D) if D != 1 else 1
    total = Fraction(0)
    for a in range(1, f + 1):
        c = kronecker(D, a)
        if c:
            val = _bernoulli_poly(k, Rational(a, f))
            total += c * Fraction(int(val.p), int(val.q))
    return total * f ** (k - 1)


def eisenstein_qexp(k, D1, D2, L):
    """E_k^{chi1,chi2} with chi_i = (D_i|.), as a coefficient list.

    Level |D1|*|D2|, character (D1*D2|.); requires (D1*D2|-1) = (-1)^k.
    Coefficient of q^n is sum_{d|n} chi1(n/d) chi2(d) d^(k-1); the constant
    term is -B_{k,chi2}/(2k) when chi1 is trivial and 0 otherwise.
    """
    sign = kronecker(D1 * D2, -1) if D1 * D2 != 1 else 1
    if sign != (-1) ** k:
        raise ValueError("parity mismatch for weight %d" % k)
    if k == 2 and D1 == 1 and D2 == 1:
        raise ValueError("E_2 is not modular; use e2d")
    coeffs = [Fraction(0)] * L
    if D1 == 1:
        coeffs[0] = -bernoulli_chi(k, D2) / (2 * k)
    for n in range(1, L):
        s = 0
        for d in range(1, n + 1):
            if n % d == 0:
                c1 = kronecker(D1, n // d)
                if c1:
                    c2 = kronecker(D2, d)
                    if c2:
                        s += c1 * c2 * d ** (k - 1)
        coeffs[n] = Fraction(s)
    return coeffs


def e2d(d, L):
    """E_2(tau) - d E_2(d tau): weight 2, level d, trivial character."""
    if d < 2:
        raise ValueError("need d >= 2")
    coeffs = [Fraction(1 - d)] + [Fraction(0)] * (L - 1)
    sig = [0] * L
    for n in range(1, L):
        for m in range(n, L, n):
            sig[m] += n
    for n in range(1, L):
        s = sig[n]
        if n % d == 0:
            s -= d * sig[n // d]
        coeffs[n] = Fraction(-24 * s)
    return coeffs
