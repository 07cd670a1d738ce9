"""Finite-field tables, cyclotomic integers, characters, Jacobi/Gauss sums."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgtrace.ff_core import (
    CycInt,
    FieldTooLarge,
    FiniteFieldTable,
    NotPrime,
    OrderMismatch,
    PrecisionTooLow,
    binomial_ff,
    build_field,
    char_eval,
    char_eval_minus_one,
    char_exponent,
    gauss_sum,
    jacobi_sum,
)


# ---------------------------------------------------------------------------
# CycInt
# ---------------------------------------------------------------------------

class TestCycInt:
    def test_zeta_order(self):
        for M in (1, 2, 3, 4, 5, 6, 8, 10, 12, 24):
            z = CycInt.zeta_pow(M, 1)
            assert z ** M == CycInt.one(M)
            for k in range(1, M):
                assert z ** k != CycInt.one(M) or M == 1

    def test_ring_ops(self):
        z = CycInt.zeta_pow(5, 1)
        # 1 + z + z^2 + z^3 + z^4 = 0
        assert (1 + z + z ** 2 + z ** 3 + z ** 4).is_zero()
        assert (z * z.conj()) == CycInt.one(5)
        assert z.mul_zeta(4) == CycInt.one(5)

    def test_inverse(self):
        x = CycInt.zeta_pow(12, 5) + 3
        assert x * x.inverse() == CycInt.one(12)
        assert (x / x) == CycInt.one(12)
        with pytest.raises(ZeroDivisionError):
            CycInt.zero(7).inverse()

    def test_galois_is_hom(self):
        x = CycInt.zeta_pow(10, 1) + 2 * CycInt.zeta_pow(10, 3)
        y = CycInt.zeta_pow(10, 7) - 1
        for c in (1, 3, 7, 9):
            assert (x * y).galois(c) == x.galois(c) * y.galois(c)
            assert (x + y).galois(c) == x.galois(c) + y.galois(c)

    def test_lift_compatible(self):
        x = CycInt.zeta_pow(5, 2)
        assert x.lift(10).embed(96).ae(x.embed(96), 1e-20)
        assert (x.lift(10) * x.conj().lift(10)).to_rational() == 1

    def test_embed(self):
        z = CycInt.zeta_pow(8, 1)
        v = z.embed(96)
        assert abs(v - mpmath.exp(2j * mpmath.pi / 8)) < 1e-12
        # sum of all 8th roots of unity vanishes
        s = sum((CycInt.zeta_pow(8, k) for k in range(8)), CycInt.zero(8))
        assert s.is_zero()

    def test_rational_extraction(self):
        x = CycInt.from_rational(6, Fraction(3, 2))
        assert x.to_rational() == Fraction(3, 2)
        with pytest.raises(ValueError):
            x.to_rational_integer()
        with pytest.raises(ValueError):
            CycInt.zeta_pow(5, 1).to_rational()

    @given(st.integers(0, 11), st.integers(0, 11), st.integers(-5, 5))
    @settings(max_examples=60, deadline=None)
    def test_mul_matches_embedding(self, i, j, c):
        a = CycInt.zeta_pow(12, i) + c
        b = CycInt.zeta_pow(12, j) - c
        exact = (a * b).embed(96)
        approx = a.embed(96) * b.embed(96)
        assert abs(exact - approx) < 1e-10


# ---------------------------------------------------------------------------
# field tables
# ---------------------------------------------------------------------------

class TestFiniteFieldTable:
    def test_rejects_bad_input(self):
        with pytest.raises(NotPrime):
            build_field(15)
        with pytest.raises(NotPrime):
            build_field(2)
        with pytest.raises(FieldTooLarge):
            build_field(1048583)

    def test_prime_field_generator(self):
        F7 = build_field(7)
        assert F7.g == 3  # smallest primitive root mod 7
        assert sorted(F7.exp_g(k) for k in range(6)) == [1, 2, 3, 4, 5, 6]

    @pytest.mark.parametrize("p,s", [(5, 2), (3, 3), (13, 1), (7, 2)])
    def test_dlog_roundtrip(self, p, s):
        F = build_field(p, s)
        q = p ** s
        seen = set()
        for x in range(1, q):
            k = F.dlog(x)
            assert F.exp_g(k) == x
            seen.add(k)
        assert seen == set(range(q - 1))

    def test_arithmetic_consistency(self):
        F = build_field(5, 2)
        one = F.from_int(1)
        for x in F.elements():
            assert F.add(x, F.neg(x)) == 0
            if x:
                assert F.mul(x, F.inv(x)) == one
        # distributivity spot check via dlog tables
        for x in (3, 7, 12, 24):
            for y in (1, 6, 13):
                for z in (2, 9):
                    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))

    def test_trace(self):
        F = build_field(5, 2)
        # trace of 1 is s * 1 = 2
        assert F.trace(F.from_int(1)) == 2
        # trace is F_p-linear and surjective onto F_p
        assert {F.trace(x) for x in F.elements()} == set(range(5))
        total = 0
        for x in F.elements():
            total = (total + F.trace(x)) % 5
        assert total == 0


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

class TestCharacters:
    def test_char_exponent_checks_order(self):
        F13 = build_field(13)
        with pytest.raises(OrderMismatch):
            char_exponent(F13, 1, 5)  # 5 does not divide 12
        with pytest.raises(OrderMismatch):
            char_exponent(F13, 1, 4)  # omega itself has order 12, not 4
        assert char_exponent(F13, 3, 4) == 1

    def test_quadratic_character(self):
        F5 = build_field(5)
        phi = (F5.q - 1) // 2
        squares = {F5.mul(x, x) for x in range(1, 5)}
        for x in range(1, 5):
            v = char_eval(F5, phi, x, 2).to_rational_integer()
            assert v == (1 if x in squares else -1)
        assert char_eval(F5, phi, 0, 2).is_zero()

    def test_multiplicativity(self):
        F = build_field(13)
        M = 12
        k = 1
        for x in range(1, 13):
            for y in range(1, 13):
                lhs = char_eval(F, k, F.mul(x, y), M)
                rhs = char_eval(F, k, x, M) * char_eval(F, k, y, M)
                assert lhs == rhs

    def test_orthogonality(self):
        F = build_field(7)
        M = 6
        for k in range(6):
            s = sum((char_eval(F, k, x, M) for x in range(1, 7)), CycInt.zero(M))
            if k % 6 == 0:
                assert s.to_rational_integer() == 6
            else:
                assert s.is_zero()


# ---------------------------------------------------------------------------
# Jacobi and Gauss sums
# ---------------------------------------------------------------------------

class TestSums:
    def test_trivial_trivial(self):
        F5 = build_field(5)
        assert jacobi_sum(F5, 0, 0, 1).to_rational_integer() == 5 - 2

    def test_quadratic_values(self):
        F5 = build_field(5)
        phi = 2  # omega^2 has order 2
        assert jacobi_sum(F5, phi, phi, 2).to_rational_integer() == -1
        assert jacobi_sum(F5, 0, phi, 2).to_rational_integer() == -1

    def test_symmetry(self):
        F = build_field(13)
        for (ka, kb) in [(1, 2), (3, 4), (2, 7)]:
            assert jacobi_sum(F, ka, kb, 12) == jacobi_sum(F, kb, ka, 12)

    def test_absolute_value(self):
        # |J(A,B)|^2 = q when A, B, AB all nontrivial
        F = build_field(13)
        J = jacobi_sum(F, 1, 2, 12)
        assert (J * J.conj()).to_rational_integer() == 13

    def test_jacobi_from_gauss(self):
        # J(A,B) = g(A) g(B) / g(AB) for A, B, AB nontrivial
        F = build_field(25, 1) if False else build_field(5, 2)
        q1 = F.q - 1
        ka, kb = 1, 5
        ga, _ = gauss_sum(F, ka, 128)
        gb, _ = gauss_sum(F, kb, 128)
        gab, _ = gauss_sum(F, ka + kb, 128)
        J = jacobi_sum(F, ka, kb, q1).embed(128)
        assert abs(J - ga * gb / gab) < 1e-12

    def test_gauss_norm(self):
        # g(A) g(Abar) = A(-1) q for nontrivial A; |g|^2 = q
        F = build_field(5, 2)
        g1, err = gauss_sum(F, 1, 128)
        g2, _ = gauss_sum(F, F.q - 2, 128)
        Am1 = char_eval_minus_one(F, 1, F.q - 1).embed(128)
        assert abs(g1 * g2 - Am1 * F.q) < 1e-10
        assert abs(abs(g1) ** 2 - F.q) < 1e-10
        assert err < 1e-20

    def test_gauss_trivial(self):
        F = build_field(7)
        g0, _ = gauss_sum(F, 0, 96)
        assert abs(g0 + 1) < 1e-12  # g(eps) = -1 with the A(0)=0 convention

    def test_precision_floor(self):
        F = build_field(7)
        with pytest.raises(PrecisionTooLow):
            gauss_sum(F, 1, 32)

    def test_binomial_values(self):
        # over F_5 with phi the quadratic character:
        # binom(eps,eps) = -J(eps,eps) = -(q-2) = -3 ... check against defn
        F5 = build_field(5)
        phi = 2
        b = binomial_ff(F5, phi, 0, 2)
        expected = -(char_eval_minus_one(F5, 0, 2) * jacobi_sum(F5, phi, 0, 2))
        assert b == expected
