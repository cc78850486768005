"""Tests for the convergent-series evaluator: parameters, terms, policies."""

from fractions import Fraction
from math import gcd

import gmpy2
import mpmath
import pytest

from regpart.floats import exp_pi_i, workprec
from regpart.hrr import (
    EvaluationError,
    HrrParams,
    SeriesReport,
    TruncationPolicy,
    a_km,
    bessel_i1,
    choose_precision,
    delta_k,
    evaluate,
    term_k,
)
from regpart.numtheory import mod_inverse_neg, omega_ratio
from regpart.qseries import cmk_coeffs, default_cmk_order, oracle_prs

# 72 digits of I_1(2), summed independently from the defining series
I1_AT_2 = "1.59063685463732906338225442499966624795447815949553664713228798460854504"


def test_params_validation():
    p = HrrParams(14, 15, 500)
    assert p.R == Fraction(91, 12)
    assert not p.is_experimental()
    with pytest.raises(ValueError):
        HrrParams(1, 3, 10)
    with pytest.raises(ValueError):
        HrrParams(4, 6, 10)  # gcd 2
    with pytest.raises(ValueError):
        HrrParams(6, 25, 10)  # 25 not square-free
    q = HrrParams(6, 25, 10, allow_non_squarefree=True)
    assert q.is_experimental()
    assert q.R == Fraction(5)


def test_delta_k_values():
    assert delta_k(14, 15, 1) == Fraction(91, 12)
    assert delta_k(14, 15, 5) == Fraction(-13, 12)
    assert delta_k(14, 15, 210) == Fraction(91, 12)
    assert delta_k(2, 3, 1) == Fraction(1, 12)
    with pytest.raises(ValueError):
        delta_k(14, 15, 0)
    with pytest.raises(ValueError):
        delta_k(1, 15, 3)


def test_delta_k_periodicity():
    for r, s in [(2, 3), (14, 15)]:
        for k in range(1, 3 * r * s + 1):
            assert delta_k(r, s, k) == delta_k(r, s, k + r * s)


def test_choose_precision_floor_and_monotonicity():
    p = HrrParams(14, 15, 8)
    assert choose_precision(p, 1) >= 96
    assert choose_precision(p, 1) % 32 == 0
    # dominant exponent for n=500 is ~77 bits, plus headroom and guard
    big = choose_precision(HrrParams(14, 15, 500), 11)
    assert big >= 77 + 96
    prev = 0
    for n in (8, 50, 500, 5000):
        bits = choose_precision(HrrParams(14, 15, n), 16)
        assert bits >= prev
        prev = bits
    assert choose_precision(p, 64) >= choose_precision(p, 2)


def test_bessel_i1_basics():
    assert bessel_i1(0, 96) == 0
    with workprec(224):
        ref = gmpy2.mpfr(I1_AT_2)
    got = bessel_i1(2, 160)
    assert abs(got - ref) <= gmpy2.exp2(-152) * ref
    values = [bessel_i1(x, 96) for x in (0, Fraction(1, 2), 1, 2, 5, 20)]
    assert values == sorted(values)  # strictly increasing series
    assert all(b > a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        bessel_i1(-1, 96)


def test_bessel_i1_against_mpmath():
    mpmath.mp.prec = 200
    for x in ("0.125", "1", "2.75", "19.5", "52.9"):
        ref = mpmath.besseli(1, mpmath.mpf(x))
        got = bessel_i1(gmpy2.mpfr(x, 160), 160)
        assert abs(got - gmpy2.mpfr(str(ref), 160)) <= gmpy2.exp2(-150) * got, x


def test_a_km_k1_is_one():
    assert a_km(HrrParams(14, 15, 500), 1, 0, 128) == gmpy2.mpc(1)
    assert a_km(HrrParams(2, 3, 30), 1, 0, 96) == gmpy2.mpc(1)


def test_a_km_realness_bound():
    params = HrrParams(14, 15, 500)
    prec = 192
    tol = gmpy2.exp2(-(prec // 2))
    for k in range(1, 31):
        dk = delta_k(14, 15, k)
        if dk < 0:
            continue
        for m in range(int(dk) + 1):
            z = a_km(params, k, m, prec)
            assert abs(z.imag) <= tol * (1 + abs(z.real)), (k, m)


def test_a_km_rejects_out_of_range_m():
    params = HrrParams(14, 15, 500)
    with pytest.raises(ValueError):
        a_km(params, 1, 8, 128)  # floor(delta_1) = 7
    with pytest.raises(ValueError):
        a_km(params, 1, -1, 128)
    with pytest.raises(ValueError):
        a_km(params, 0, 0, 128)


def manual_a_km(params, k, m, prec, representative):
    # assemble A_{k,m}(n) by hand from exact Phases, with an explicit choice
    # of the residue H in exp(2*pi*i*m*r_k*s_k*H/(r*s*k))
    r, s, n = params.r, params.s, params.n
    rk, sk = gcd(r, k), gcd(s, k)
    c = cmk_coeffs(r, s, rk, sk, default_cmk_order(r, s)).coeff(m)
    with workprec(prec):
        acc = gmpy2.mpc(0)
        for h in range(k):
            if gcd(h, k) != 1:
                continue
            H = representative(h, k)
            theta = (
                omega_ratio(h, k, r, s).exponent
                - Fraction(2 * n * h, k)
                + Fraction(2 * m * rk * sk * H, r * s * k)
            )
            acc += exp_pi_i(theta)
        return acc * c


def crt_representative(h, k, L):
    # H with h*H = -1 (mod k) and L | H; the moduli are coprime here
    if k == 1:
        return 0
    t = (-pow(h * L, -1, k)) % k
    H = L * t
    assert (h * H) % k == k - 1 and H % L == 0
    return H


def test_a_km_uses_crt_adjusted_inverse():
    # (r,s,k) = (14,15,11): L = rs = 210 and m >= 1 terms are live.  The
    # production sum must equal the hand-built one with the CRT-adjusted H.
    params = HrrParams(14, 15, 500)
    k, m, prec = 11, 1, 192
    produced = a_km(params, k, m, prec)
    by_hand = manual_a_km(params, k, m, prec, lambda h, kk: crt_representative(h, kk, 210))
    assert abs(produced - by_hand) <= gmpy2.exp2(-prec + 16) * (1 + abs(produced))


def test_naive_inverse_representative_is_wrong():
    # Taking H as the plain negative inverse in [0, k) changes A_{k,m}(n)
    # whenever m >= 1: the value is NOT invariant under H -> H + k (each
    # summand picks up exp(2*pi*i*m*r_k*s_k/(r*s))), and with the naive
    # representative the sum is visibly non-real.
    params = HrrParams(14, 15, 500)
    k, m, prec = 11, 1, 192
    good = manual_a_km(params, k, m, prec, lambda h, kk: crt_representative(h, kk, 210))
    naive = manual_a_km(params, k, m, prec, mod_inverse_neg)
    shifted = manual_a_km(params, k, m, prec, lambda h, kk: crt_representative(h, kk, 210) + kk)
    tol = gmpy2.exp2(-(prec // 2))
    assert abs(good.imag) <= tol * (1 + abs(good.real))
    assert abs(naive - good) > 0.01 * abs(good)
    assert abs(naive.imag) > 0.01 * abs(naive)
    # the H -> H + k shift rotates every summand by the same unit
    with workprec(prec):
        rotation = exp_pi_i(Fraction(2 * m * gcd(14, k) * gcd(15, k), 14 * 15))
        assert abs(shifted - good * rotation) <= gmpy2.exp2(-prec + 16) * (1 + abs(good))
        assert abs(shifted - good) > 0.01 * abs(good)


def test_term_k_zero_terms_cost_nothing():
    params = HrrParams(14, 15, 500)
    for k in (5, 7, 10):
        assert delta_k(14, 15, k) < 0
        assert term_k(params, k, 192) == 0
    # scan the first period: exactly the negative-delta classes vanish
    for k in range(1, 211):
        if delta_k(14, 15, k) < 0:
            assert term_k(params, k, 192) == 0, k


def test_term_k8_inner_sum_cancels():
    params = HrrParams(14, 15, 500)
    prec = 256
    t1 = term_k(params, 1, prec)
    t8 = term_k(params, 8, prec)
    assert delta_k(14, 15, 8) > 0  # the sum is not empty, it cancels
    assert abs(t8) < 1e-12 * abs(t1)


def test_term_k1_matches_dominant_partial_sum():
    params = HrrParams(14, 15, 500)
    prec = choose_precision(params, 11)
    t1 = term_k(params, 1, prec)
    with workprec(prec):
        s1 = gmpy2.mpfr("310093947025049932429.8505")
        assert abs(t1 - s1) < gmpy2.mpfr("0.01")


def test_term_k_rejects_bad_arguments():
    params = HrrParams(14, 15, 500)
    with pytest.raises(ValueError):
        term_k(params, 0, 128)
    with pytest.raises(ValueError):
        term_k(HrrParams(14, 15, 7), 1, 128)  # n <= R


def test_evaluate_small_case_with_oracle():
    report = evaluate(HrrParams(2, 3, 30), TruncationPolicy(oracle_check=True))
    assert report.value == 60
    assert report.oracle_checked
    assert report.residual < 0.5
    assert report.N_used >= 1
    assert report.partial_sums is None


def test_evaluate_rejects_n_at_or_below_R():
    with pytest.raises(ValueError):
        evaluate(HrrParams(14, 15, 7))  # R = 91/12 > 7
    with pytest.raises(ValueError):
        evaluate(HrrParams(2, 3, 0))


def test_evaluate_keep_trace_is_monotone_in_N():
    policy = TruncationPolicy(N=25, keep_trace=True)
    report = evaluate(HrrParams(5, 6, 80), policy)
    assert [k for k, _ in report.partial_sums] == list(range(1, 26))
    assert report.N_used == 25


def test_evaluate_fixed_N_matches_scan_result():
    scan = evaluate(HrrParams(5, 6, 80), TruncationPolicy(oracle_check=True))
    fixed = evaluate(HrrParams(5, 6, 80), TruncationPolicy(N=scan.N_used))
    assert fixed.value == scan.value == oracle_prs(5, 6, 80)


def test_evaluate_is_deterministic():
    policy = TruncationPolicy(N=30, keep_trace=True)
    a = evaluate(HrrParams(5, 6, 80), policy)
    b = evaluate(HrrParams(5, 6, 80), policy)
    assert a.value == b.value
    assert a.N_used == b.N_used
    assert a.precision_bits == b.precision_bits
    assert a.residual == b.residual and str(a.residual) == str(b.residual)
    assert all(x == y for (_, x), (_, y) in zip(a.partial_sums, b.partial_sums))


def test_evaluate_precision_stability():
    lo = evaluate(HrrParams(5, 6, 80), TruncationPolicy(N=40, keep_trace=True, precision_bits=192))
    hi = evaluate(HrrParams(5, 6, 80), TruncationPolicy(N=40, keep_trace=True, precision_bits=256))
    s_lo = lo.partial_sums[-1][1]
    s_hi = hi.partial_sums[-1][1]
    with workprec(256):
        assert abs(s_hi - s_lo) < gmpy2.exp2(-32) * abs(s_hi)


def test_evaluate_small_n_with_large_rs_still_certifies():
    # the default cap 64*ceil(sqrt(n)) alone could not fit one stability
    # window of rs = 210 partial sums for n this small
    report = evaluate(HrrParams(14, 15, 8), TruncationPolicy(oracle_check=True))
    assert report.value == oracle_prs(14, 15, 8) == 22
    assert report.oracle_checked


def test_evaluate_experimental_mode_warns_and_matches_oracle():
    with pytest.warns(RuntimeWarning):
        report = evaluate(
            HrrParams(6, 25, 30, allow_non_squarefree=True),
            TruncationPolicy(oracle_check=True),
        )
    assert report.value == oracle_prs(6, 25, 30)
    assert report.oracle_checked


def test_evaluate_fails_loudly_when_uncertifiable():
    # a one-term cap cannot stabilize a window for (14,15,500)
    with pytest.raises(EvaluationError):
        evaluate(HrrParams(14, 15, 500), TruncationPolicy(N_max=40))


def test_report_field_types():
    report = evaluate(HrrParams(2, 3, 12), TruncationPolicy(oracle_check=True))
    assert isinstance(report, SeriesReport)
    assert isinstance(report.value, int)
    assert isinstance(report.N_used, int)
    assert isinstance(report.precision_bits, int)
    assert isinstance(report.oracle_checked, bool)
    assert report.residual >= 0
