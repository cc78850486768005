"""Tests for the classical p(n) series used as the convergence baseline."""

from fractions import Fraction

import gmpy2
import mpmath
import pytest

from regpart.floats import workprec
from regpart.rademacher import (
    RademacherParams,
    a_k,
    bessel_i32,
    bessel_i32_series,
    choose_precision_p,
    evaluate_p,
    partition_oracle,
)

# p(0)..p(9), textbook values
P_SMALL = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30]


def test_params_validation():
    RademacherParams(1, 64)
    with pytest.raises(ValueError):
        RademacherParams(0, 64)
    with pytest.raises(ValueError):
        RademacherParams(5, 4)


def test_partition_oracle_small_and_frozen():
    assert [partition_oracle(n) for n in range(10)] == P_SMALL
    assert partition_oracle(100) == 190569292
    assert partition_oracle(500) == 2300165032574323995027
    with pytest.raises(ValueError):
        partition_oracle(-1)


def test_a_k_unit_and_parity():
    prec = 128
    tol = gmpy2.exp2(-prec + 8)
    for n in (1, 7, 500):
        assert a_k(n, 1, prec) == 1
        # omega(1,2) = 1 and the h=1 phase is exp(-pi*i*n)
        assert abs(a_k(n, 2, prec) - (-1) ** n) < tol


def test_a_k_realness_over_grid():
    # the internal imaginary-part assertion runs on every call
    prec = 128
    for n in (1, 37, 500, 1000):
        for k in range(1, 101):
            a_k(n, k, prec)


def test_a_k_rejects_bad_k():
    with pytest.raises(ValueError):
        a_k(5, 0, 128)


def test_bessel_i32_dual_paths_agree():
    prec = 192
    tol = gmpy2.exp2(-prec + 8)
    for x in (Fraction(1, 2), 1, 5, 20):
        closed = bessel_i32(x, prec)
        series = bessel_i32_series(x, prec)
        assert abs(closed - series) <= tol * series, x


def test_bessel_i32_against_mpmath():
    mpmath.mp.prec = 200
    for x in ("0.25", "1", "5", "17.5"):
        ref = mpmath.besseli(mpmath.mpf("1.5"), mpmath.mpf(x))
        got = bessel_i32(gmpy2.mpfr(x, 160), 160)
        assert abs(got - gmpy2.mpfr(str(ref), 160)) <= gmpy2.exp2(-150) * got, x


def test_bessel_i32_positivity_and_small_x_limit():
    prec = 160
    assert bessel_i32(Fraction(1, 1000), prec) > 0
    # leading term (x/2)^{3/2}/Gamma(5/2) dominates as x -> 0
    x = Fraction(1, 10 ** 6)
    series = bessel_i32_series(x, prec)
    with workprec(prec):
        xb = gmpy2.mpfr(x.numerator) / x.denominator
        lead = gmpy2.sqrt(xb / 2) * (xb / 2) * 4 / (3 * gmpy2.sqrt(gmpy2.const_pi()))
        assert abs(series - lead) < gmpy2.mpfr("1e-9") * lead
    with pytest.raises(ValueError):
        bessel_i32(0, prec)
    with pytest.raises(ValueError):
        bessel_i32(-2, prec)


def test_choose_precision_p_floor_and_quantization():
    assert choose_precision_p(1, 8) >= 96
    assert choose_precision_p(500, 90) % 32 == 0
    assert choose_precision_p(500, 90) > choose_precision_p(5, 10)


def test_evaluate_p_known_values():
    assert evaluate_p(4).value == 5
    assert evaluate_p(1).value == 1
    report = evaluate_p(500, oracle_check=True)
    assert report.value == 2300165032574323995027
    assert report.oracle_checked
    assert report.residual < 0.5


def test_evaluate_p_six_terms_suffice_at_500():
    report = evaluate_p(500, N=6)
    assert report.N_used == 6
    assert report.value == 2300165032574323995027
    assert report.residual < 0.5


def test_evaluate_p_matches_oracle_through_300():
    for n in range(1, 301):
        assert evaluate_p(n).value == partition_oracle(n), n


def test_evaluate_p_rejects_bad_n():
    with pytest.raises(ValueError):
        evaluate_p(0)
