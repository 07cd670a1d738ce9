"""Tests for exact and high-precision classical hypergeometric series."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from hgtrace.classical_series import (
    DenominatorPole,
    GammaPole,
    NonTerminating,
    NotConvergent,
    PrecisionUnreachable,
    SeriesSpec,
    clausen_check,
    gamma_quotient_exact,
    hgs_coeffs,
    hgs_terms,
    hgs_truncated,
    hgs_value_at_1,
    lemma_233_check,
    length6_datum,
    pochhammer,
    seven_f_six_coeffs,
    whipple_check,
    whipple2_check,
)

F = Fraction
HALF = F(1, 2)


# -- truncated sums ---------------------------------------------------------

def test_truncation_zero_is_one():
    assert hgs_truncated([HALF], [F(1)], 1, 0) == 1


def test_terminating_2f1_at_one_step():
    # upper (-1, b), lower (c) with the factorial column: sum is 1 - b z / c
    b, c, z = F(2, 3), F(5, 7), F(3, 4)
    assert hgs_truncated([F(-1), b], [c, F(1)], z, 1) == 1 - b * z / c


def test_half_cubed_truncation_mod_25():
    val = hgs_truncated([HALF] * 3, [F(1)] * 3, 1, 4)
    num, den = val.numerator, val.denominator
    assert den % 5 != 0
    assert num * pow(den, -1, 25) % 25 == 19


def test_denominator_pole_raised():
    with pytest.raises(DenominatorPole):
        hgs_terms([HALF, HALF], [F(-2), F(1)], 1, 5)


def test_termination_shields_pole():
    # upper hits zero at k=2 before the lower parameter -3 poles at k=3
    terms = hgs_terms([F(-2), HALF], [F(-3), F(1)], 1, 6)
    assert terms[3:] == [F(0)] * 4


def test_pochhammer_values():
    assert pochhammer(HALF, 3) == F(15, 8)
    assert pochhammer(F(1), 5) == 120
    assert pochhammer(F(-2), 3) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(-6, 6), st.integers(1, 6), st.integers(-6, 6),
       st.integers(1, 6), st.integers(0, 12))
def test_term_recurrence_property(an, ad, bn, bd, k):
    """term_{k+1}/term_k = prod(a_i+k)/prod(b_j+k) * z, checked exactly."""
    a, b = F(an, ad), F(bn, bd)
    upper, lower, z = [a, HALF], [b + F(13), F(1)], F(2, 3)
    terms = hgs_terms(upper, lower, z, k + 1)
    lhs = terms[k + 1]
    ratio = F(1)
    for u in upper:
        ratio *= u + k
    for l in lower:
        ratio /= l + k
    assert lhs == terms[k] * ratio * z


def test_series_spec_coerces_to_fractions():
    spec = SeriesSpec(upper=(HALF, "1/3"), lower=(1, 1), argument=1)
    assert all(isinstance(x, Fraction) for x in spec.upper)
    assert spec.upper[1] == F(1, 3)


# -- values at z = 1 --------------------------------------------------------

def test_3f2_half_cubed_closed_form():
    res = hgs_value_at_1([HALF] * 3, [F(1)] * 3, precision=110)
    with mp.workprec(130):
        target = mp.gamma(mp.mpf(1) / 4) ** 4 / (4 * mp.pi ** 3)
        assert abs(res.value - target) < mp.mpf(10) ** -30


def test_4f3_half_fourth_value():
    res = hgs_value_at_1([HALF] * 4, [F(1)] * 4, precision=90)
    with mp.workprec(110):
        assert abs(res.value - mp.mpf("1.118636387164187068349619")) \
            < mp.mpf(10) ** -20


def test_6f5_length6_value_has_certified_bound():
    upper, lower = length6_datum(HALF, HALF)
    res = hgs_value_at_1(upper, lower, precision=80)
    with mp.workprec(100):
        assert abs(res.value - mp.mpf("1.020460777067235682")) < 1e-17
    assert res.tail_bound <= mp.mpf(2) ** -80


def test_terminating_value_is_exact():
    res = hgs_value_at_1([F(-3), HALF], [F(2), F(1)], precision=64)
    exact = hgs_truncated([F(-3), HALF], [F(2), F(1)], 1, 3)
    with mp.workprec(80):
        assert abs(res.value - mp.mpf(exact.numerator) / exact.denominator) \
            < mp.mpf(2) ** -60
    assert res.tail_bound == 0


def test_divergent_series_rejected():
    with pytest.raises(NotConvergent):
        hgs_value_at_1([F(2), F(2)], [HALF, F(1)], precision=32)


def test_slowly_convergent_series_rejected():
    # excess 1/2: convergent but outside the certified-comparison range
    with pytest.raises(PrecisionUnreachable):
        hgs_value_at_1([HALF] * 3, [F(1)] * 2, precision=32)


def test_tail_bound_honesty():
    """A sharper recomputation moves the value by less than the bound."""
    upper, lower = [HALF, HALF], [F(3), F(1)]
    lo = hgs_value_at_1(upper, lower, precision=16)
    hi = hgs_value_at_1(upper, lower, precision=80)
    assert not lo.accelerated
    assert abs(lo.value - hi.value) < lo.tail_bound


# -- Gamma quotients --------------------------------------------------------

def test_gamma_quotient_integer_shifts():
    # Gamma(7/2)/Gamma(3/2) = 15/4 and Gamma(1/2)/Gamma(5/2) = 4/3
    q = gamma_quotient_exact([F(7, 2), HALF], [F(3, 2), F(5, 2)])
    assert q == F(5)


def test_gamma_quotient_unpairable_returns_none():
    assert gamma_quotient_exact([F(1, 3)], [HALF]) is None


def test_gamma_pole_detected():
    with pytest.raises(GammaPole):
        gamma_quotient_exact([F(-2)], [F(1)])


# -- Whipple's formula ------------------------------------------------------

def test_whipple_g_zero_trivial():
    rep = whipple_check(HALF, F(1, 3), F(2, 3), F(-2), F(1, 4), F(0),
                        mode="terminating_exact")
    assert rep.passed


def test_whipple_terminating_example():
    rep = whipple_check(HALF, F(1, 3), F(2, 3), F(-2), F(1, 4), F(-1),
                        mode="terminating_exact")
    assert rep.passed


def test_whipple_requires_termination_in_exact_mode():
    with pytest.raises(NonTerminating):
        whipple_check(HALF, F(1, 3), F(2, 3), F(1, 5), F(1, 4), F(1, 7),
                      mode="terminating_exact")


def test_whipple_randomized_terminating_tuples():
    """The terminating identity holds for 25 randomized parameter tuples."""
    import random
    rng = random.Random(20260825)
    n_pass = 0
    trials = 0
    while n_pass < 25 and trials < 200:
        trials += 1
        def generic():
            # non-integer positive rational, so only g terminates the sums
            den = rng.choice([2, 3, 4, 5, 6])
            return rng.randint(0, 3) + F(1, den)

        a, c, d, e, f = (generic() for _ in range(5))
        g = F(-rng.randint(0, 4))
        try:
            rep = whipple_check(a, c, d, e, f, g, mode="terminating_exact")
        except (DenominatorPole, GammaPole, ZeroDivisionError):
            continue
        assert rep.passed, (a, c, d, e, f, g)
        n_pass += 1
    assert n_pass == 25


def test_whipple_specialized_numeric():
    for (c, f, p) in [(HALF, F(1, 3), 3), (F(1, 3), F(1, 3), 5),
                      (F(1, 5), F(2, 5), 7)]:
        rep = whipple2_check(c, f, p, precision=256)
        assert rep.passed, (c, f, p)


def test_whipple_numeric_mode():
    rep = whipple_check(HALF, F(1, 3), F(2, 3), F(-2), F(1, 4), F(-1),
                        mode="numeric")
    assert rep.passed


# -- Clausen-type identities ------------------------------------------------

def test_clausen_square_identity_quarter():
    rep = clausen_check(F(1, 4), F(1, 4), 20)
    assert rep.passed


def test_clausen_mixed_identity():
    rep = clausen_check(F(1, 4), F(7, 12), 20)
    assert rep.passed


def test_clausen_order_zero():
    rep = clausen_check(F(1, 4), F(1, 4), 0)
    assert rep.passed


# -- algebraic 3F2 evaluation as a power series -----------------------------

def test_lemma_233_low_order():
    assert lemma_233_check(10).passed


def test_lemma_233_deep():
    assert lemma_233_check(25).passed


def test_lemma_233_order_zero():
    assert lemma_233_check(0).passed


# -- the length-7 derivative relation ---------------------------------------

@pytest.mark.parametrize("c,f", [
    (HALF, HALF), (HALF, F(1, 3)), (HALF, F(1, 6)), (F(1, 3), F(1, 3)),
    (F(1, 6), F(1, 6)), (F(1, 5), F(2, 5)), (F(1, 10), F(3, 10)),
])
def test_seven_f_six_is_4zFprime_plus_F(c, f):
    """Coefficientwise: the length-7 series equals 4z F'(z) + F(z)."""
    upper, lower = length6_datum(c, f)
    base = hgs_coeffs(upper, lower, 30)
    direct = seven_f_six_coeffs(c, f, 30)
    for k in range(31):
        assert direct[k] == (1 + 4 * k) * base[k]
