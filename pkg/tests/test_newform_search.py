"""Tests for the offline coefficient pipeline: characters, dimension
formulas, elliptic-curve local data, and the generated fixtures."""

import json
import os
from fractions import Fraction
from math import gcd

import pytest
import sympy

from hgtrace.dirichlet import (
    CharGroup,
    bernoulli_chi,
    dim_cusp,
    dim_new,
    eisenstein_qexp,
    genus_gamma0,
    kronecker,
)
from hgtrace.modular_forms import fixture_dir, handle
from hgtrace.newform_search import (
    HIGHER_WEIGHT_TARGETS,
    TWIST_PAIRS,
    _cyc_trace,
    _sub_char,
    check_hecke_relations,
    curve_an,
    curve_conductor,
    eisenstein_systems,
    isogeny_classes,
    weight2_newforms,
)


# -- Kronecker symbol and characters ----------------------------------------

def test_kronecker_matches_sympy():
    for d in (-20, -8, -4, -3, 1, 5, 8, 12, -24):
        for n in range(1, 60):
            assert kronecker(d, n) == int(sympy.jacobi_symbol(d, n)) \
                if n % 2 and gcd(d, n) == 1 else True


def test_kronecker_basic_values():
    assert [kronecker(-4, n) for n in (1, 3, 5, 7, 9)] == [1, -1, 1, -1, 1]
    assert [kronecker(-3, p) for p in (7, 13, 5, 11)] == [1, 1, -1, -1]
    assert kronecker(-8, 3) == 1
    assert kronecker(5, 2) == -1


@pytest.mark.parametrize("N,disc,letter", [
    (12, -3, "c"), (8, -8, "d"), (36, -4, "d"), (20, -20, "d"),
])
def test_orbit_letter_anchors(N, disc, letter):
    chi = _sub_char(N, disc)
    assert chi is not None
    assert CharGroup(N).orbit_letter(chi) == letter


def test_quadratic_char_values_match_kronecker():
    chi = _sub_char(20, -20)
    for n in range(1, 40):
        if gcd(n, 20) == 1:
            assert chi(n) == kronecker(-20, n)


def test_cyc_trace():
    # trace of zeta_n^j from Q(zeta_n) to Q
    assert _cyc_trace(1, 0) == 1
    assert _cyc_trace(4, 1) == 0
    assert _cyc_trace(4, 2) == -2
    assert _cyc_trace(6, 1) == 1
    assert _cyc_trace(5, 1) == -1
    assert _cyc_trace(5, 0) == 4


# -- dimension formulas ------------------------------------------------------

def test_bernoulli_plain():
    assert bernoulli_chi(4, 1) == Fraction(-1, 30)
    assert bernoulli_chi(2, 1) == Fraction(1, 6)


def test_dim_cusp_known_values():
    assert dim_cusp(6, 4) == 1
    assert dim_cusp(8, 4) == 1
    assert dim_cusp(11, 2) == 1
    assert dim_cusp(36, 4) == 12
    assert dim_cusp(4, 6) == 1
    assert dim_cusp(36, 3, _sub_char(36, -4)) == 8
    assert dim_cusp(20, 3, _sub_char(20, -20)) == 4


def test_dim_new_weight2_counts():
    for level, count in ((20, 1), (24, 1), (36, 1), (40, 1), (72, 1),
                         (50, 2), (200, 5)):
        assert dim_new(level, 2) == count, level


def test_genus_matches_weight2_cusp_dim():
    for N in (11, 20, 24, 36, 37, 50, 72, 200):
        assert genus_gamma0(N) == dim_cusp(N, 2), N


def test_eisenstein_system_counts():
    # number of ordered Eisenstein systems equals dim of the Eisenstein part
    assert len(eisenstein_systems(36, 4, _sub_char(36, 1))) == 12
    assert len(eisenstein_systems(8, 6, _sub_char(8, 1))) == 4
    assert len(eisenstein_systems(36, 3, _sub_char(36, -4))) == 8
    assert len(eisenstein_systems(20, 3, _sub_char(20, -20))) == 4


def test_eisenstein_qexp_weight4():
    # E_4 normalized: constant -B_4/8 = 1/240, then sigma_3(n)
    e4 = eisenstein_qexp(4, 1, 1, 8)
    assert e4[0] == Fraction(1, 240)
    assert e4[1:6] == [1, 9, 28, 73, 126]


# -- elliptic curves ---------------------------------------------------------

def test_curve_conductors():
    # y^2 + y = x^3 - x^2 - 10x - 20 has conductor 11
    assert curve_conductor([0, -1, 1, -10, -20])[0] == 11
    # y^2 = x^3 + 1 has conductor 36
    assert curve_conductor([0, 0, 0, 0, 1])[0] == 36
    # y^2 = x^3 - x has conductor 32
    assert curve_conductor([0, 0, 0, -1, 0])[0] == 32
    # y^2 + y = x^3 - x has conductor 37
    assert curve_conductor([0, 0, 1, -1, 0])[0] == 37


def test_curve_an_level_11():
    N, bad, model = curve_conductor([0, -1, 1, -10, -20])
    an = [0] + curve_an(model, bad, 20)
    assert an[1:11] == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2]


def test_isogeny_class_counts_certified():
    for level in (20, 24, 36):
        assert len(isogeny_classes(level)) == dim_new(level, 2)


def test_weight2_forms_match_fixtures():
    for level in (20, 24, 36, 40):
        forms = weight2_newforms(level, 20)
        fx = handle("%d.2.a.a" % level, 20)
        assert forms[0][1:21] == fx.an[1:21], level


# -- generated fixtures ------------------------------------------------------

SPOT_VALUES = {
    # a_2 .. a_7 of selected rational newforms
    "6.4.a.a": [-2, -3, 4, 6, 6, -16],
    "12.4.a.a": [0, 3, 0, -18, 0, 8],
    "36.4.a.a": [0, 0, 0, 18, 0, 8],
    "18.4.a.a": [2, 0, 4, -6, 0, -16],
    "24.4.a.a": [0, 3, 0, 14, 0, -24],
    "72.4.a.b": [0, 0, 0, -14, 0, -24],
    "10.4.a.a": [2, -8, 4, 5, -16, -4],
    "5.4.a.a": [-4, 2, 8, -5, -8, 6],
    "50.4.a.b": [-2, -2, 4, 0, 4, -26],
    "50.4.a.d": [2, 2, 4, 0, 4, 26],
    "4.6.a.a": [0, -12, 0, 54, 0, -88],
    "6.6.a.a": [4, -9, 16, -66, -36, 176],
    "8.6.a.a": [0, 20, 0, -74, 0, -24],
    "36.3.d.b": [2, 0, 4, -8, 0, 0],
    "20.3.d.a": [-2, 4, 4, -5, -8, -4],
}


def test_fixture_files_exist_for_all_targets():
    for label in HIGHER_WEIGHT_TARGETS:
        assert os.path.exists(
            os.path.join(fixture_dir(), label + ".json")), label


def test_fixture_spot_values():
    for label, values in SPOT_VALUES.items():
        h = handle(label)
        assert h.an[2:8] == values, label


def test_fixture_hecke_relations():
    for label, (level, k, disc, _) in HIGHER_WEIGHT_TARGETS.items():
        h = handle(label)
        check_hecke_relations(h.an, k, level, disc)


def test_twist_relations():
    """Quadratic-twist pairs agree coefficientwise after the character."""
    for (label1, label2, D) in TWIST_PAIRS:
        a = handle(label1).an
        b = handle(label2).an
        n_max = min(len(a), len(b)) - 1
        checked = 0
        for p in sympy.primerange(2, n_max + 1):
            chi = kronecker(D, p)
            if chi == 0:
                continue
            assert b[p] == chi * a[p], (label1, label2, p)
            checked += 1
        assert checked > 20


def test_fixture_json_schema():
    path = os.path.join(fixture_dir(), "36.3.d.b.json")
    with open(path) as fh:
        data = json.load(fh)
    assert data["label"] == "36.3.d.b"
    assert data["weight"] == 3
    assert data["level"] == 36
    assert data["an"][0] == 1          # stored from a_1
    assert "source" in data and "fetched_at" in data


def test_character_sum_cross_check_20_3_d_a():
    """Finite-field route reproduces fixture coefficients at split primes."""
    from hgtrace.char_sums import p_normalized
    from hgtrace.ff_core import build_field
    from hgtrace.hg_datum import whipple_family
    h = handle("20.3.d.a")
    datum = whipple_family(Fraction(1, 5), Fraction(2, 5))["HD3"]
    for p in (11, 31, 41):
        val = p_normalized(datum, 1, build_field(p)).to_rational_integer()
        assert val == h.an[p], p
