"""Tests for q-expansions, coefficient lookup, evaluation and L-values."""

from fractions import Fraction

import mpmath
import pytest

from hgtrace import modular_forms as mf
from hgtrace.classical_series import hgs_coeffs, hgs_value_at_1
from hgtrace.modular_forms import (
    CoefficientUnavailable,
    InexactDivision,
    QSeries,
    TruncationTooLarge,
    UnknownLabel,
    ap,
    eta_eval,
    eta_quotient,
    eval_upper_half,
    handle,
    l_value,
    l_value_sign_check,
    parse_label,
    special_series,
)

F = Fraction


# -- QSeries arithmetic -----------------------------------------------------

def test_qseries_add_mul_truncation():
    a = QSeries.from_integer_coeffs([1, 2, 3], 3)
    b = QSeries.from_integer_coeffs([1, -1], 3)
    s = a + b
    assert [s.coeff(n) for n in range(3)] == [2, 1, 3]
    p = a * b
    # (1+2q+3q^2)(1-q) = 1 + q + q^2 - 3q^3, valid to q^3
    assert [p.coeff(n) for n in range(3)] == [1, 1, 1]
    assert p.prec_exp <= 3


def test_qseries_exact_division():
    a = QSeries.from_integer_coeffs([1, 0, -1], 10)   # 1 - q^2
    b = QSeries.from_integer_coeffs([1, 1], 10)       # 1 + q
    q = a.divide(b)
    assert [q.coeff(n) for n in range(2)] == [1, -1]


def test_qseries_inexact_division_fails_loudly():
    num = QSeries.from_integer_coeffs([1, 1, 1], 10)
    den = QSeries.from_integer_coeffs([2, 1], 10)
    with pytest.raises(InexactDivision):
        num.divide(den, require_exact=True)


def test_qseries_integer_power():
    a = QSeries.from_integer_coeffs([1, 1], 6)
    cube = a ** 3
    assert [cube.coeff(n) for n in range(4)] == [1, 3, 3, 1]


def test_qseries_fractional_exponents():
    th3 = special_series("theta3", 10)
    assert th3.coeff(0) == 1
    assert th3.coeff(F(1, 2)) == 2
    assert th3.coeff(1) == 0
    assert th3.coeff(2) == 2
    assert th3.coeff(F(9, 2)) == 2


# -- eta quotients ----------------------------------------------------------

def test_eta_core_pentagonal():
    core = eta_quotient([(1, 1)], 15)   # q^{1/24} * prod(1 - q^n)
    shift = F(1, 24)
    expected = {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1}
    for n in range(13):
        assert core.coeff(n + shift) == expected.get(n, 0)


def test_eta4_power6():
    s = eta_quotient([(4, 6)], 30)
    assert [s.coeff(n) for n in (1, 5, 9, 13)] == [1, -6, 9, 10]


def test_eta_2_4_product():
    s = eta_quotient([(2, 4), (4, 4)], 30)
    assert [s.coeff(n) for n in (1, 3, 5, 7)] == [1, -4, -2, 24]


def test_eta_truncation_guard():
    with pytest.raises(TruncationTooLarge):
        eta_quotient([(1, 1)], 10 ** 6 + 1)


# -- special series ---------------------------------------------------------

def test_t2_leading_terms():
    t2 = special_series("t2", 8)
    assert t2.coeff(1) == -64
    assert t2.coeff(2) == -1536


def test_e2_leading_terms():
    e2 = special_series("E2", 6)
    assert [e2.coeff(n) for n in range(5)] == [1, -24, -72, -96, -168]


def test_jacobi_four_square_identity():
    th2 = special_series("theta2", 51) ** 4
    th3 = special_series("theta3", 51) ** 4
    th4 = special_series("theta4", 51) ** 4
    diff = th3 - th2 - th4
    for n in range(0, 101):
        assert diff.coeff(F(n, 2)) == 0


def test_theta_lambda_bridge():
    """2F1(1/2,1/2;1;lambda(tau))^2 agrees with theta3^4 as a q-series."""
    N = 41
    lam = special_series("lambda", N)
    coeffs = hgs_coeffs([F(1, 2), F(1, 2)], [F(1), F(1)], 2 * N)
    # square of the 2F1: compose with the lambda series, then square
    acc = QSeries.constant(0)
    power = QSeries.constant(1)
    for c in coeffs:
        acc = acc + c * power
        power = (power * lam).truncate(N)
    lhs = (acc * acc).truncate(N)
    th3 = (special_series("theta3", N) ** 4).truncate(N)
    for n in range(N):
        assert lhs.coeff(n) == th3.coeff(n), n


# -- labels and coefficient lookup ------------------------------------------

def test_parse_label():
    assert parse_label("8.4.a.a") == (8, 4, "a", "a")
    assert parse_label("200.2.a.e") == (200, 2, "a", "e")


def test_malformed_label_rejected():
    with pytest.raises(UnknownLabel):
        parse_label("8.4a.a")


def test_offline_without_fixture():
    with pytest.raises(CoefficientUnavailable):
        handle("11.2.a.a", offline=True)


def test_ap_eta_dictionary():
    assert ap("η(4τ)⁶", 5) == -6
    assert ap("8.4.a.a", 3) == -4
    assert ap("η(4τ)⁶", 7) == 0


def test_cm_vanishing():
    h = handle("η(4τ)⁶")
    for p in (3, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83, 103, 107,
              127, 131, 139, 151, 163, 167, 179, 191, 199):
        assert h.ap(p) == 0, p


def test_hecke_multiplicativity_on_cached_lists():
    for label in ("8.4.a.a", "6.6.a.a", "36.4.a.a", "20.3.d.a", "36.3.d.b",
                  "24.2.a.a", "4.6.a.a"):
        h = handle(label)
        n_max = len(h.an) - 1
        for m in range(2, n_max + 1):
            for n in range(2, n_max // m + 1):
                from math import gcd
                if gcd(m, n) == 1:
                    assert h.an[m * n] == h.an[m] * h.an[n], (label, m, n)


def test_eta_vs_fixture_agreement():
    from hgtrace.modular_forms import _eta_an, _load_fixture
    for label, name in (("8.4.a.a", "η(2τ)⁴η(4τ)⁴"),
                        ("4.6.a.a", "η(2τ)¹²"),
                        ("8.6.a.a", "8.6.a.a")):
        fx = _load_fixture(label)
        assert fx is not None
        n_max = min(len(fx.an) - 1, 200)
        eta = _eta_an(name, n_max)
        assert eta[1:n_max + 1] == fx.an[1:n_max + 1], label


def test_handle_normalization_invariant():
    for label in ("8.4.a.a", "36.4.a.a", "20.3.d.a"):
        assert handle(label).an[1] == 1


# -- numeric evaluation -----------------------------------------------------

def test_eta_at_i():
    val = eta_eval(1j, precision=96)
    with mpmath.workprec(120):
        target = mpmath.gamma(mpmath.mpf(1) / 4) / \
            (2 * mpmath.pi ** mpmath.mpf(0.75))
        assert abs(val - target) < mpmath.mpf(2) ** -88


def test_eta_multiplier():
    tau = 0.5j
    with mpmath.workprec(120):
        ratio = eta_eval(tau + 1, precision=96) / eta_eval(tau, precision=96)
        target = mpmath.exp(1j * mpmath.pi / 12)
        assert abs(ratio - target) < mpmath.mpf(2) ** -80


def test_eta_functional_equation():
    tau = mpmath.mpc(0.5, 1.0)
    with mpmath.workprec(120):
        lhs = eta_eval(-1 / tau, precision=96)
        rhs = mpmath.sqrt(-1j * tau) * eta_eval(tau, precision=96)
        assert abs(lhs - rhs) < mpmath.mpf(2) ** -80


def test_t2_inversion_relation():
    """t2(-1/(2 tau)) * t2(tau) = 1 at sample points off the imaginary axis."""
    t2 = special_series("t2", 400)
    pts = [mpmath.mpc(x, y) for x, y in
           ((0.05, 0.9), (-0.1, 1.1), (0.2, 1.0), (0.0, 0.8), (0.15, 1.2),
            (-0.2, 0.95), (0.1, 1.3), (-0.05, 1.05), (0.25, 1.15),
            (0.0, 1.0))]
    with mpmath.workprec(80):
        for tau in pts:
            a = eval_upper_half(t2, tau, precision=48)
            b = eval_upper_half(t2, -1 / (2 * tau), precision=48)
            assert abs(a * b - 1) < 1e-10, tau


# -- L-values ---------------------------------------------------------------

def test_l_value_4f3_identity():
    lv = l_value("8.4.a.a", 2, precision=96)
    series = hgs_value_at_1([F(1, 2)] * 4, [F(1)] * 4, precision=80)
    with mpmath.workprec(110):
        assert abs(16 / mpmath.pi ** 2 * lv - series.value) < 1e-10


def test_l_value_3f2_identity():
    lv = l_value("η(4τ)⁶", 2, precision=96)
    series = hgs_value_at_1([F(1, 2)] * 3, [F(1)] * 3, precision=80)
    with mpmath.workprec(110):
        assert abs(16 / mpmath.pi ** 2 * lv - series.value) < 1e-10


def test_l_value_sign_diagnostic():
    good = l_value_sign_check(handle("8.4.a.a"), 2, precision=64, fe_sign=1)
    bad = l_value_sign_check(handle("8.4.a.a"), 2, precision=64, fe_sign=-1)
    assert good < 1e-12
    assert bad > 1e-6
