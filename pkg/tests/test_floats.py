"""Tests for the shared arbitrary-precision float helpers."""

from fractions import Fraction

import gmpy2
import pytest

from regpart.floats import exp_pi_i, sqrt_rational, to_float, workprec


def test_workprec_sets_and_restores_precision():
    outer = gmpy2.get_context().precision
    with workprec(160):
        assert gmpy2.get_context().precision == 160
        with workprec(96):
            assert gmpy2.get_context().precision == 96
        assert gmpy2.get_context().precision == 160
    assert gmpy2.get_context().precision == outer


def test_workprec_restores_on_error():
    outer = gmpy2.get_context().precision
    with pytest.raises(RuntimeError):
        with workprec(128):
            raise RuntimeError("boom")
    assert gmpy2.get_context().precision == outer


def test_exp_pi_i_quarter_turns():
    # theta = 0 is exact; the rest see pi rounded once, so allow ~1 ulp
    with workprec(128):
        tol = gmpy2.exp2(-120)
        assert exp_pi_i(Fraction(0)) == gmpy2.mpc(1)
        assert abs(exp_pi_i(Fraction(1, 2)) - gmpy2.mpc(0, 1)) < tol
        assert abs(exp_pi_i(Fraction(1)) - gmpy2.mpc(-1)) < tol
        assert abs(exp_pi_i(Fraction(3, 2)) - gmpy2.mpc(0, -1)) < tol
        # the exponent reduces mod 2 before any rounding
        assert exp_pi_i(Fraction(5, 2)) == exp_pi_i(Fraction(1, 2))
        assert exp_pi_i(Fraction(-1, 2)) == exp_pi_i(Fraction(3, 2))


def test_exp_pi_i_eighth_turn():
    with workprec(128):
        z = exp_pi_i(Fraction(1, 4))
        root_half = gmpy2.sqrt(gmpy2.mpfr(1) / 2)
        tol = gmpy2.exp2(-120)
        assert abs(z.real - root_half) < tol
        assert abs(z.imag - root_half) < tol
        assert abs(abs(z) - 1) < tol


def test_exp_pi_i_is_multiplicative():
    with workprec(128):
        tol = gmpy2.exp2(-120)
        a, b = Fraction(3, 7), Fraction(5, 11)
        assert abs(exp_pi_i(a) * exp_pi_i(b) - exp_pi_i(a + b)) < tol


def test_to_float_rounds_rationals_once():
    with workprec(64):
        x = to_float(Fraction(1, 3))
        assert abs(x - gmpy2.mpfr(1) / 3) <= gmpy2.exp2(-64)
        assert to_float(Fraction(7, 8)) == gmpy2.mpfr("0.875")
        assert to_float(5) == 5


def test_sqrt_rational_exact_squares():
    with workprec(96):
        assert sqrt_rational(Fraction(9, 4)) == gmpy2.mpfr("1.5")
        assert sqrt_rational(Fraction(0)) == 0
        assert sqrt_rational(4) == 2


def test_sqrt_rational_rejects_negative():
    with workprec(96):
        with pytest.raises(ValueError):
            sqrt_rational(Fraction(-1, 4))
