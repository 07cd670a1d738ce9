"""Datum validation, orbit predicates, e-profiles, gamma vectors, parsing."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgtrace.hg_datum import (
    BadBeta1,
    NotDefinedOverQ,
    WHIPPLE_PAIRS,
    WHIPPLE_PAIRS_OVER_Q,
    ZeroLambda,
    e_profile,
    e_step,
    gamma_vector,
    lcd,
    new_datum,
    parse_datum,
    whipple_family,
)


def test_validation():
    with pytest.raises(BadBeta1):
        new_datum((F(1, 2),), (F(1, 2),), 1)
    with pytest.raises(ZeroLambda):
        new_datum((F(1, 2),), (1,), 0)
    with pytest.raises(ValueError):
        new_datum((F(1, 2),), (1, 1), 1)


def test_basic_attributes():
    d = new_datum((F(1, 2), F(1, 3), F(2, 3)), (1, F(7, 6), F(5, 6)), 1)
    assert d.n == 3
    assert d.M == 6
    assert d.m_integral_beta == 1
    assert lcd([F(1, 2), F(13, 10)]) == 10


def test_predicates_length4():
    d = new_datum((F(1, 2),) * 4, (1,) * 4, 1)
    assert d.is_primitive and d.is_self_dual and d.is_defined_over_Q
    nonprim = new_datum((F(1, 2), F(1, 3)), (1, F(4, 3)), 1)
    assert not nonprim.is_primitive


def test_over_q_notions_differ():
    # alpha and beta are separately orbit-stable but the column pairing is
    # not preserved by every c coprime to 10
    d = new_datum((F(1, 2), F(1, 5), F(2, 5), F(3, 5), F(4, 5)),
                  (1, F(1, 10), F(3, 10), F(7, 10), F(9, 10)), 1)
    assert d.is_defined_over_Q_unordered
    assert not d.is_defined_over_Q
    assert d.is_self_dual


def test_whipple_pairs_over_q():
    for (c, f) in WHIPPLE_PAIRS_OVER_Q:
        fam = whipple_family(c, f)
        assert fam["HD1"].is_defined_over_Q
        assert fam["HD2"].is_defined_over_Q
        assert fam["HD1"].is_self_dual and fam["HD2"].is_self_dual
    for (c, f) in WHIPPLE_PAIRS[5:]:
        fam = whipple_family(c, f)
        assert not fam["HD2"].is_defined_over_Q
        assert not fam["HD2"].is_defined_over_Q_unordered
        assert fam["HD1"].is_defined_over_Q_unordered


def test_whipple_family_invariants():
    for (c, f) in WHIPPLE_PAIRS:
        fam = whipple_family(c, f)
        M, N = fam["M"], fam["N"]
        if (c, f) == (F(1, 2), F(1, 3)):
            assert N == M
        else:
            assert N == 2 * M
        assert fam["HD1"].n == 6 and fam["HD2"].n == 4 and fam["HD3"].n == 3
    with pytest.raises(ValueError):
        whipple_family(F(1, 7), F(2, 7))
    fam = whipple_family(F(1, 7), F(2, 7), allow_any=True)
    assert not fam["is_standard_pair"]


def test_self_dual_parity():
    # for a self-dual datum defined over Q, n - m is even
    for (c, f) in WHIPPLE_PAIRS_OVER_Q:
        for key in ("HD1", "HD2"):
            d = whipple_family(c, f)[key]
            assert (d.n - d.m_integral_beta) % 2 == 0


class TestEProfile:
    def test_mixed_orbit_example(self):
        d = new_datum((F(1, 2), F(1, 5), F(2, 5), F(3, 5), F(4, 5)),
                      (1, F(1, 10), F(3, 10), F(7, 10), F(9, 10)), 1)
        ep = e_profile(d)
        assert (ep.min_e, ep.max_e, ep.weight, ep.twist) == (-1, 2, 3, -1)

    def test_whipple_length4(self):
        ep = e_profile(whipple_family(F(1, 3), F(1, 3))["HD2"])
        assert (ep.min_e, ep.weight, ep.twist) == (-1, 4, 0)
        ep = e_profile(whipple_family(F(1, 6), F(1, 6))["HD2"])
        assert (ep.min_e, ep.max_e, ep.weight, ep.twist) == (0, 2, 2, -1)

    def test_no_twist_without_orbits(self):
        ep = e_profile(whipple_family(F(1, 10), F(3, 10))["HD2"])
        assert ep.twist is None

    def test_step_values_on_intervals(self):
        d = new_datum((F(1, 2),) * 4, (1,) * 4, 1)
        # e jumps up by 4 just after 1/2 and down by 4 at x -> 1 (b = 1 -> 0)
        assert e_step(d, F(1, 4)) == 0
        assert e_step(d, F(3, 4)) == 4
        ep = e_profile(d)
        assert ep.weight == 4 and ep.twist == 0

    @given(st.sampled_from(WHIPPLE_PAIRS_OVER_Q),
           st.sampled_from([1, 3, 7, 9, 11, 13]))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_scaling(self, pair, c):
        # (weight, twist) only depend on the datum up to scaling by units
        d = whipple_family(*pair)["HD2"]
        if c % d.M and __import__("math").gcd(c, d.M) == 1:
            ep1, ep2 = e_profile(d), e_profile(d.scaled(c))
            assert (ep1.weight, ep1.twist) == (ep2.weight, ep2.twist)


class TestGammaVector:
    def test_halves(self):
        gv = gamma_vector(new_datum((F(1, 2),) * 4, (1,) * 4, 1))
        assert gv.plist == (2, 2, 2, 2)
        assert gv.qlist == (1,) * 8
        assert gv.N_const == 256

    def test_single_half(self):
        gv = gamma_vector(new_datum((F(1, 2),), (1,), 1))
        assert gv.plist == (2,) and gv.qlist == (1, 1)
        assert gv.N_const == 4

    def test_sixth_orbit(self):
        d = whipple_family(F(1, 6), F(1, 6))["HD2"]
        gv = gamma_vector(d)
        # (X^2-1)^2 (X^6-1) / ((X-1)^4 (X^2-1)(X^3-1)) after cancellation
        assert sum(gv.plist) - sum(gv.qlist) == 0

    def test_rejects_partial_orbit(self):
        d = new_datum((F(1, 5),), (1,), 1)
        with pytest.raises(NotDefinedOverQ):
            gamma_vector(d)

    def test_s_multiplicity(self):
        gv = gamma_vector(new_datum((F(1, 2),) * 4, (1,) * 4, 1))
        # s(0) = min(r, s) = min(4, 8) = 4
        assert gv.s_multiplicity(0, 12) == 4
        # at m = 6 the numerator side vanishes 4 times but no (X^1 - 1)
        # factor does, so the gcd multiplicity is 0
        assert gv.s_multiplicity(6, 12) == 0
        assert gv.s_multiplicity(1, 12) == 0


def test_parse_datum():
    d = parse_datum("alpha=1/2,1/2 beta=1,1 lambda=1")
    assert d.alpha == (F(1, 2), F(1, 2)) and d.lam == 1
    d = parse_datum("HD2(1/2,1/3)")
    assert d.alpha == (F(1, 2), F(1, 2), F(1, 3), F(2, 3))
    assert d.beta == (1, 1, 1, 1)
    d = parse_datum("HD2(1/3,1/3)")
    assert d.beta == (1, 1, F(7, 6), F(5, 6))
    with pytest.raises(ValueError):
        parse_datum("alpha=1/2 beta=1")
    with pytest.raises(ZeroLambda):
        parse_datum("alpha=1/2 beta=1 lambda=0")
