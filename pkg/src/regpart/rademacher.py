"""Rademacher's convergent series for the unrestricted partition count p(n).

    p(n) = 2*pi*(24n-1)^(-3/4) * sum_{k>=1} (A_k(n)/k)
           * I_{3/2}((pi/k) * sqrt((2/3)(n - 1/24)))

with A_k(n) = sum over h coprime to k of omega(h,k) * exp(-2*pi*i*n*h/k).
It is the classical special case of the restricted series in `hrr` and
serves as the comparison baseline: same exact-phase assembly, same policy
machinery, but a closed-form half-integer Bessel kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

import gmpy2

from .floats import (
    GUARD_BITS,
    MIN_PRECISION,
    BigComplex,
    BigFloat,
    exp_pi_i,
    to_float,
    workprec,
)
from .hrr import EvaluationError, SeriesReport, _ceil_sqrt, _root_table, _run_series
from .numtheory import dedekind_sum
from .qseries import IntSeries, euler_product, series_div

__all__ = [
    "RademacherParams",
    "a_k",
    "bessel_i32",
    "bessel_i32_series",
    "evaluate_p",
    "partition_oracle",
]

#: Stability window for the rounded-value scan; the tail structure here is
#: governed by k mod 24, so 24 consecutive agreeing partial sums are required.
STABILITY_WINDOW = 24


@dataclass(frozen=True)
class RademacherParams:
    """Inputs of one p(n) evaluation."""

    n: int
    precision_bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1, got n={self.n}")
        if self.precision_bits < MIN_PRECISION:
            raise ValueError(f"need precision >= {MIN_PRECISION} bits, got {self.precision_bits}")


# omega(h,k) = exp(pi*i*s(h,k)) per k, shared across n and precisions in its
# exact form; the floating version is cached per (k, prec).  Write-once maps.
_UNIT_CACHE: Dict[Tuple[int, int], Tuple[Tuple[int, ...], Tuple[BigComplex, ...]]] = {}


def _unit_table(k: int, prec: int) -> Tuple[Tuple[int, ...], Tuple[BigComplex, ...]]:
    key = (k, prec)
    tab = _UNIT_CACHE.get(key)
    if tab is None:
        hs = tuple(h for h in range(k) if gcd(h, k) == 1)
        exponents = [Fraction(0) if k == 1 else dedekind_sum(h, k) for h in hs]
        with workprec(prec):
            units = tuple(exp_pi_i(e) for e in exponents)
        tab = _UNIT_CACHE.setdefault(key, (hs, units))
    return tab


def a_k(n: int, k: int, prec: int) -> BigFloat:
    """A_k(n) = sum_h omega(h,k) exp(-2*pi*i*n*h/k), returned as its real part.

    Phases are exact rationals rounded once each; the imaginary part of the
    sum must vanish and is asserted small (same bound as in `hrr`).
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got k={k}")
    hs, units = _unit_table(k, prec)
    roots = _root_table(k, prec)
    with workprec(prec):
        acc = gmpy2.mpc(0)
        for h, u in zip(hs, units):
            acc += u * roots[(n * h) % k]
        tol = gmpy2.exp2(-(prec // 2))
        if not abs(acc.imag) <= tol * (1 + abs(acc.real)):
            raise EvaluationError(f"A_{k}({n}) is not real within tolerance: {acc}")
        return acc.real


def bessel_i32(x, prec: int) -> BigFloat:
    """I_{3/2}(x) by the closed form sqrt(2/(pi*x)) * (cosh x - sinh x / x).

    Production path (two elementary functions); `bessel_i32_series` is the
    independent power-series route used to cross-check it.  x must be
    positive: the closed form is singular at 0.
    """
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {prec}")
    with workprec(prec + GUARD_BITS):
        xb = to_float(x) if isinstance(x, (int, Fraction, gmpy2.mpq)) else gmpy2.mpfr(x)
        if not xb > 0:
            raise ValueError(f"bessel_i32 needs x > 0, got {xb}")
        value = gmpy2.sqrt(2 / (gmpy2.const_pi() * xb)) * (gmpy2.cosh(xb) - gmpy2.sinh(xb) / xb)
    with workprec(prec):
        return gmpy2.mpfr(value)


def bessel_i32_series(x, prec: int) -> BigFloat:
    """I_{3/2}(x) = sum_{m>=0} (x/2)^(3/2+2m) / (m! * Gamma(m + 5/2)).

    Defining series; positive terms, so summation is stable.  Serves as the
    test oracle for `bessel_i32` and covers the x -> 0 limit.
    """
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {prec}")
    with workprec(prec + GUARD_BITS):
        xb = to_float(x) if isinstance(x, (int, Fraction, gmpy2.mpq)) else gmpy2.mpfr(x)
        if xb < 0:
            raise ValueError(f"bessel_i32_series needs x >= 0, got {xb}")
        total = gmpy2.mpfr(0)
        if xb > 0:
            half = xb / 2
            h2 = half * half
            # First term: (x/2)^(3/2) / Gamma(5/2), Gamma(5/2) = 3*sqrt(pi)/4.
            term = half * gmpy2.sqrt(half) * 4 / (3 * gmpy2.sqrt(gmpy2.const_pi()))
            total = term
            eps = gmpy2.exp2(-(prec + GUARD_BITS))
            m = 1
            while term >= eps * total:
                # ratio t_m / t_{m-1} = (x/2)^2 / (m * (m + 3/2))
                term = term * h2 * 2 / (m * (2 * m + 3))
                total += term
                m += 1
    with workprec(prec):
        return gmpy2.mpfr(total)


def choose_precision_p(n: int, N: int) -> int:
    """Bits for the dominant term exp(pi*sqrt(2n/3)) plus the usual headroom."""
    bits = math.pi * math.sqrt(2 * max(n, 1) / 3) / math.log(2) + 10 * math.log2(N + 2) + 96
    return ((math.ceil(bits) + 31) // 32) * 32


# Partition numbers from the q-series side: coefficients of 1/(x;x)_inf,
# cached at power-of-two orders (write-once per key).
_P_CACHE: Dict[int, List[int]] = {}


def partition_oracle(n: int) -> int:
    """p(n) as the x^n coefficient of 1/(x;x)_inf, exact integers throughout."""
    if n < 0:
        raise ValueError(f"need n >= 0, got n={n}")
    cap = 64
    while cap < n:
        cap *= 2
    table = _P_CACHE.get(cap)
    if table is None:
        coeffs = series_div(IntSeries.one(cap), euler_product(1, cap)).coeffs
        table = _P_CACHE.setdefault(cap, coeffs)
    return table[n]


def evaluate_p(
    n: int,
    N: Optional[int] = None,
    prec: Optional[int] = None,
    oracle_check: bool = False,
) -> SeriesReport:
    """Sum Rademacher's series for p(n), round, and certify.

    With `N` given, exactly N terms are summed; otherwise the scan starts at
    N_default = ceil(4*sqrt(n)) and extends to at most 64*ceil(sqrt(n))
    until the rounded value is stable over 24 consecutive partial sums.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    root = _ceil_sqrt(n)
    n_hard = N if N is not None else 64 * root
    n_start = min(max(_ceil_sqrt(16 * n), STABILITY_WINDOW), n_hard)
    params = RademacherParams(n, prec or choose_precision_p(n, n_hard))
    bits = params.precision_bits

    def term(k: int) -> BigFloat:
        with workprec(bits):
            ak = a_k(n, k, bits)
            # Bessel argument (pi/k)*sqrt((2/3)(n - 1/24)) from one exact rational.
            arg = gmpy2.const_pi() / k * gmpy2.sqrt(to_float(Fraction(24 * n - 1, 36)))
            return ak / k * bessel_i32(arg, bits)

    with workprec(bits):
        # 2*pi*(24n-1)^(-3/4): (24n-1)^(3/4) as sqrt * sqrt(sqrt).
        base = gmpy2.mpfr(24 * n - 1)
        r2 = gmpy2.sqrt(base)
        prefactor = 2 * gmpy2.const_pi() / (r2 * gmpy2.sqrt(r2))

    value, n_used, residual, trace = _run_series(
        lambda k: prefactor * term(k),
        n_start=n_start,
        n_hard=n_hard,
        window=min(STABILITY_WINDOW, n_hard),
        fixed_n=N,
        prec=bits,
        keep_trace=False,
        label=f"p({n})",
    )
    oracle_checked = False
    if oracle_check:
        expected = partition_oracle(n)
        if value != expected:
            raise EvaluationError(f"series value {value} for p({n}) disagrees with oracle {expected}")
        oracle_checked = True
    return SeriesReport(value, n_used, residual, trace, bits, oracle_checked)
