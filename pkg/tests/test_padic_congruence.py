"""Tests for truncated sums mod p^k, p-adic Gamma, unit roots, and the
congruence registry."""

import random
from fractions import Fraction

import pytest
import sympy

from hgtrace.modular_forms import ap
from hgtrace.padic_congruence import (
    CASES,
    CostGuard,
    NonUnitDenominator,
    NotPAdicInteger,
    NotPIntegral,
    PadicResidue,
    UnknownCase,
    dwork_unit_root,
    max_verified_exponent,
    padic_gamma,
    supercongruence_check,
    truncated_mod,
)

F = Fraction
HALF = F(1, 2)
HD_HALF = ([HALF] * 3, [F(1)] * 3)


# -- residues ----------------------------------------------------------------

def test_residue_roundtrip():
    r = PadicResidue.from_rational(F(50, 3), 5, 3)
    assert r.valuation == 2
    assert r.residue() == 50 * pow(3, -1, 125) % 125


def test_residue_negative_valuation_flagged():
    r = PadicResidue.from_rational(F(1, 5), 5, 3)
    assert r.valuation == -1
    with pytest.raises(NotPIntegral):
        r.residue()


def test_residue_addition_aligns_valuations():
    a = PadicResidue.from_rational(F(25), 5, 4)
    b = PadicResidue.from_rational(F(5), 5, 4)
    assert (a + b).residue() == 30
    c = PadicResidue.from_rational(F(-5), 5, 4)
    assert (b + c).unit == 0


# -- truncated sums ----------------------------------------------------------

def test_truncated_trivial():
    assert truncated_mod([HALF], [F(1)], 0, 7, 3) == 1


def test_truncated_half_cubed_mod_25():
    assert truncated_mod(*HD_HALF, 4, 5, 2) == 19
    assert (truncated_mod(*HD_HALF, 4, 5, 2) - (-6)) % 25 == 0


def test_truncated_consistent_across_k():
    v3 = truncated_mod(*HD_HALF, 12, 13, 3)
    v2 = truncated_mod(*HD_HALF, 12, 13, 2)
    assert v3 % 13 ** 2 == v2


def test_truncated_prefactor_makes_integral():
    # the (1/3,1/3) length-6 sum needs p^2 at p = 7
    case = CASES["s14_3"]
    lower = list(case.lower) + [F(1)]
    with pytest.raises(NotPIntegral):
        truncated_mod(case.upper, lower, 6, 7, 4, p_power_prefactor=0)
    res = truncated_mod(case.upper, lower, 6, 7, 4, p_power_prefactor=2)
    assert res == ap("6.6.a.a", 7) % 7 ** 4


def test_cost_guard():
    with pytest.raises(CostGuard):
        truncated_mod(*HD_HALF, 4, 101, 4)


# -- p-adic Gamma ------------------------------------------------------------

def test_gamma_at_integers():
    for p, k in ((5, 3), (7, 2), (11, 3)):
        pk = p ** k
        assert padic_gamma(1, p, k) == pk - 1   # Gamma_p(1) = -1
        assert padic_gamma(0, p, k) == 1


def test_gamma_rejects_non_integer():
    with pytest.raises(NotPAdicInteger):
        padic_gamma(F(1, 5), 5, 3)


def test_gamma_cost_guard():
    with pytest.raises(CostGuard):
        padic_gamma(1, 5, 12)


def test_gamma_functional_equation():
    """Gamma_p(x+1) = -x Gamma_p(x) for p not dividing x, else -Gamma_p(x)."""
    rng = random.Random(7)
    for p in (5, 7, 11):
        pk = p ** 3
        for _ in range(50):
            n = rng.randrange(pk)
            lhs = padic_gamma(n + 1, p, 3)
            g = padic_gamma(n, p, 3)
            rhs = (-n * g if n % p else -g) % pk
            assert lhs == rhs, (p, n)


def test_gamma_quarter_identity_at_5():
    """-Gamma_5(1/4)^4 equals the truncated sum mod 5^3 (5 = 1 mod 4)."""
    g4 = pow(padic_gamma(F(1, 4), 5, 3), 4, 125)
    lhs = truncated_mod(*HD_HALF, 4, 5, 3)
    assert lhs == -g4 % 125


# -- Dwork unit roots --------------------------------------------------------

def test_dwork_s1_is_plain_truncation():
    for p in (5, 13):
        assert dwork_unit_root(*HD_HALF, 1, p, 1) == \
            truncated_mod(*HD_HALF, p - 1, p, 1)


def test_dwork_matches_cm_coefficient():
    # at p = 13 (1 mod 4) the unit root reduces to a_13 of the CM form
    assert dwork_unit_root(*HD_HALF, 1, 13, 1) == ap("η(4τ)⁶", 13) % 13


def test_dwork_deeper_matches_gamma():
    val = dwork_unit_root(*HD_HALF, 1, 5, 2)
    assert val == -pow(padic_gamma(F(1, 4), 5, 2), 4, 25) % 25


def test_dwork_non_unit_rejected():
    # at p = 7 (3 mod 4) the truncation is divisible by p
    with pytest.raises(NonUnitDenominator):
        dwork_unit_root(*HD_HALF, 1, 7, 2)


# -- the congruence registry -------------------------------------------------

def test_unknown_case():
    with pytest.raises(UnknownCase):
        supercongruence_check("nope", 7)


def test_range_guard():
    with pytest.raises(ValueError):
        supercongruence_check("s46_1", 11)


def test_ahlgren_theorem_all_primes():
    for p in sympy.primerange(5, 51):
        rep = supercongruence_check("ahlgren", p, 2)
        assert rep.passed, p
        assert rep.status == "theorem-verified"


def test_long_ramakrishna_both_branches():
    for p in sympy.primerange(5, 38):
        rep = supercongruence_check("long_ramakrishna", p, 3)
        assert rep.passed, p
        assert rep.status == "theorem-verified"


def test_e7f61_example():
    rep = supercongruence_check("e7f61", 5, 4)
    assert rep.passed
    assert rep.rhs == 5 * (-2) % 5 ** 4


def test_s14_1_proven_floor():
    rep = supercongruence_check("s14_1", 7, 3)
    assert rep.passed
    assert rep.status == "theorem-verified"   # mod p^3 is a theorem here


def test_conjectural_cases_at_13():
    for case_id in ("s14_1", "s14_2", "s14_3", "e7f61", "s46_1", "s46_2",
                    "s46_3", "s46_4", "s46_5", "s46_6"):
        case = CASES[case_id]
        rep = supercongruence_check(case_id, 13)
        assert rep.passed, case_id
        assert rep.status == "conjectural-verified@p", case_id


def test_max_verified_exponent_reaches_stated_modulus():
    assert max_verified_exponent("ahlgren", 7) >= 2
    assert max_verified_exponent("s14_1", 7) >= 5
