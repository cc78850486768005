"""Convergent-series evaluation of p_{r,s}(n).

The series being summed is, for n > R = (r-1)(s-1)/24,

    p_{r,s}(n) = sum_{k>=1} sum_{m=0}^{floor(delta_k)}
        (2*pi*A_{k,m}(n)/k) * sqrt(r_k s_k (delta_k - m) / (r s (n - R)))
        * I_1((4*pi/k) * sqrt(r_k s_k (delta_k - m) (n - R) / (r s)))

with r_k = gcd(r,k), s_k = gcd(s,k), delta_k = (r/r_k - r_k)(s/s_k - s_k)/24,
and A_{k,m}(n) a finite sum of exactly-assembled unit phases weighted by the
integer coefficients c_{m,k}.  Phases are exact rationals until a single
rounding; Bessel values come from the defining power series; partial sums are
accumulated in a fixed ascending order so results are bit-reproducible at a
given precision.

A crucial convention: the phase of the m-th coefficient involves a residue H
with h*H = -1 (mod k) that must ALSO be divisible by rs/(r_k s_k).  The two
conditions determine H mod k*rs/(r_k s_k) (CRT; the moduli are coprime for
square-free r, s), and A_{k,m}(n) is NOT invariant under other choices of H:
taking the plain representative in [0, k) breaks both the realness of
A_{k,m}(n) and the known convergence tables.  See `_KTable` below.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Dict, List, Optional, Tuple

import gmpy2

from .floats import (
    GUARD_BITS,
    MIN_PRECISION,
    BigComplex,
    BigFloat,
    exp_pi_i,
    sqrt_rational,
    to_float,
    workprec,
)
from .numtheory import is_squarefree, omega_ratio
from .qseries import cmk_coeffs, default_cmk_order, oracle_prs

__all__ = [
    "EvaluationError",
    "HrrParams",
    "TruncationPolicy",
    "SeriesReport",
    "delta_k",
    "choose_precision",
    "bessel_i1",
    "a_km",
    "term_k",
    "evaluate",
]


class EvaluationError(RuntimeError):
    """A series evaluation could not certify its result."""


@dataclass(frozen=True)
class HrrParams:
    """Inputs of one p_{r,s}(n) evaluation.

    r and s must be >= 2, coprime, and square-free; square-freeness may be
    waived with `allow_non_squarefree`, which enters the experimental regime
    (convergence to the true count is observed, not proven).
    """

    r: int
    s: int
    n: int
    allow_non_squarefree: bool = False

    def __post_init__(self):
        if self.r < 2 or self.s < 2:
            raise ValueError(f"need r, s >= 2, got r={self.r}, s={self.s}")
        if gcd(self.r, self.s) != 1:
            raise ValueError(f"need gcd(r,s) = 1, got gcd({self.r},{self.s}) = {gcd(self.r, self.s)}")
        if not self.allow_non_squarefree:
            for v in (self.r, self.s):
                if not is_squarefree(v):
                    raise ValueError(
                        f"{v} is not square-free; pass allow_non_squarefree=True "
                        f"to evaluate in the experimental regime"
                    )

    @property
    def R(self) -> Fraction:
        return Fraction((self.r - 1) * (self.s - 1), 24)

    def is_experimental(self) -> bool:
        return not (is_squarefree(self.r) and is_squarefree(self.s))


@dataclass(frozen=True)
class TruncationPolicy:
    """How many terms to sum and how to certify the rounding.

    With `N` set, exactly N terms are summed (no stability scan); otherwise
    terms accumulate from N_default = max(4*ceil(sqrt(n)), 2rs) up to at most
    `N_max` (default 64*ceil(sqrt(n))) until the rounded value has been
    constant over a trailing window of `window` consecutive partial sums
    (default rs, the period of the gcd structure, where the significant tail
    terms live) with residual < 1/2.
    """

    N: Optional[int] = None
    N_max: Optional[int] = None
    window: Optional[int] = None
    precision_bits: Optional[int] = None
    oracle_check: bool = False
    keep_trace: bool = False


@dataclass
class SeriesReport:
    """Result of a series evaluation."""

    value: int
    N_used: int
    residual: BigFloat
    partial_sums: Optional[List[Tuple[int, BigFloat]]]
    precision_bits: int
    oracle_checked: bool


def delta_k(r: int, s: int, k: int) -> Fraction:
    """delta_k = (r/r_k - r_k)(s/s_k - s_k)/24 with r_k=gcd(r,k), s_k=gcd(s,k)."""
    if r < 2 or s < 2:
        raise ValueError(f"need r, s >= 2, got r={r}, s={s}")
    if k < 1:
        raise ValueError(f"need k >= 1, got k={k}")
    rk, sk = gcd(r, k), gcd(s, k)
    return Fraction((r // rk - rk) * (s // sk - sk), 24)


def choose_precision(params: HrrParams, N: int) -> int:
    """Working precision for summing N terms of the (r,s,n) series.

    Covers the magnitude of the dominant k=1 term, exp((4*pi)*sqrt(
    delta_1*(n-R)/(rs))), plus 10*log2(N+2) bits of summation headroom and
    96 guard bits, rounded up to a multiple of 32 (so sweeps over nearby
    inputs share the same precision and its cached tables).  Callers may
    override via TruncationPolicy.precision_bits.
    """
    d1 = params.R
    growth = max(float(d1 * (Fraction(params.n) - d1) / (params.r * params.s)), 0.0)
    bits = 4 * math.pi * math.sqrt(growth) / math.log(2) + 10 * math.log2(N + 2) + 96
    return ((math.ceil(bits) + 31) // 32) * 32


def bessel_i1(x, prec: int) -> BigFloat:
    """Modified Bessel function I_1(x) = sum_{m>=0} (x/2)^{2m+1}/(m!(m+1)!).

    All terms are positive, so plain summation is stable; arithmetic runs at
    prec + guard bits and stops once a term drops below 2^-(prec+guard)
    times the running sum, then the result is rounded once to prec bits.
    """
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {prec}")
    with workprec(prec + GUARD_BITS):
        xb = to_float(x) if isinstance(x, (int, Fraction, gmpy2.mpq)) else gmpy2.mpfr(x)
        if xb < 0:
            raise ValueError(f"bessel_i1 needs x >= 0, got {xb}")
        total = gmpy2.mpfr(0)
        if xb > 0:
            half = xb / 2
            h2 = half * half
            term = half
            total = half
            eps = gmpy2.exp2(-(prec + GUARD_BITS))
            m = 1
            while term >= eps * total:
                term = term * h2 / (m * (m + 1))
                total += term
                m += 1
    with workprec(prec):
        return gmpy2.mpfr(total)


# ---------------------------------------------------------------------------
# Shared floating tables.
#
# All caches below are write-once-per-key dictionaries: builders are pure, so
# a racing double-build produces identical values and `setdefault` keeps one.

_ROOTS: Dict[Tuple[int, int], Tuple[BigComplex, ...]] = {}


def _root_table(k: int, prec: int) -> Tuple[BigComplex, ...]:
    """(exp(-2*pi*i*j/k) for j in 0..k-1) at prec bits."""
    key = (k, prec)
    tab = _ROOTS.get(key)
    if tab is None:
        with workprec(prec):
            built = tuple(exp_pi_i(Fraction(-2 * j, k)) for j in range(k))
        tab = _ROOTS.setdefault(key, built)
    return tab


@dataclass(frozen=True)
class _ClassData:
    # Everything that depends on k only through (r_k, s_k).
    delta: Fraction
    mcount: int  # floor(delta) + 1, or 0 when delta < 0 (empty inner sum)
    cm: Tuple[int, ...]
    L: int  # rs / (r_k s_k)


@dataclass(frozen=True)
class _KTable:
    # Per-k phase tables, independent of n.
    rk: int
    sk: int
    cls: _ClassData
    hs: Tuple[int, ...]  # residues coprime to k, ascending ((0,) for k=1)
    U: Tuple[BigComplex, ...]  # exp(pi*i*Omega-exponent) per h
    # (h*L)^{-1} mod k per h, or None when only m=0 is needed.  For m >= 1
    # the coefficient phase is exp(2*pi*i*m*t_h/k) with t_h = -(h*L)^{-1},
    # i.e. the CRT-adjusted H = L*t_h described in the module docstring;
    # storing the negated inverse lets every phase come from one root table
    # lookup at index (n*h + m*tneg_h) mod k.
    tneg: Optional[Tuple[int, ...]]


class _Evaluator:
    """Phase/coefficient machinery for one (r, s) at one precision.

    Holds per-divisor-class c_{m,k} tables and per-k phase tables so that
    sweeps over many n reuse all the expensive exact work.  Tables are
    built idempotently, so concurrent readers are safe.
    """

    def __init__(self, r: int, s: int, prec: int):
        self.r = r
        self.s = s
        self.prec = prec
        self._classes: Dict[Tuple[int, int], _ClassData] = {}
        self._ktabs: Dict[int, _KTable] = {}

    def class_data(self, rk: int, sk: int) -> _ClassData:
        cd = self._classes.get((rk, sk))
        if cd is None:
            r, s = self.r, self.s
            delta = Fraction((r // rk - rk) * (s // sk - sk), 24)
            if delta < 0:
                cd = _ClassData(delta, 0, (), r * s // (rk * sk))
            else:
                cm = cmk_coeffs(r, s, rk, sk, default_cmk_order(r, s)).coeffs
                cd = _ClassData(delta, int(delta) + 1, tuple(cm), r * s // (rk * sk))
            cd = self._classes.setdefault((rk, sk), cd)
        return cd

    def k_table(self, k: int) -> _KTable:
        tab = self._ktabs.get(k)
        if tab is None:
            r, s = self.r, self.s
            rk, sk = gcd(r, k), gcd(s, k)
            cls = self.class_data(rk, sk)
            hs = tuple(h for h in range(k) if gcd(h, k) == 1)
            exponents = [omega_ratio(h, k, r, s).exponent for h in hs]
            with workprec(self.prec):
                U = tuple(exp_pi_i(e) for e in exponents)
            tneg = None
            if cls.mcount > 1:
                L = cls.L % k
                if k > 1 and gcd(L, k) != 1:
                    # Unreachable for square-free r, s (a shared prime p would
                    # give p^2 | r or p^2 | s); in the experimental regime the
                    # coefficient phase for m >= 1 is then undefined.
                    raise EvaluationError(
                        f"coefficient phase undefined at k={k}: rs/(r_k s_k) = {cls.L} "
                        f"shares a factor with k and m ranges to {cls.mcount - 1}"
                    )
                tneg = tuple(0 if k == 1 else pow(h * L, -1, k) for h in hs)
            tab = self._ktabs.setdefault(k, _KTable(rk, sk, cls, hs, U, tneg))
        return tab

    def a_values(self, k: int, n: int) -> List[BigComplex]:
        """[A_{k,m}(n) for m in 0..floor(delta_k)], each times c_{m,k}."""
        tab = self.k_table(k)
        cls = tab.cls
        roots = _root_table(k, self.prec)
        nh = [(n * h) % k for h in tab.hs]
        out: List[BigComplex] = []
        with workprec(self.prec):
            zero = gmpy2.mpc(0)
            tol = gmpy2.exp2(-(self.prec // 2))
            for m in range(cls.mcount):
                c = cls.cm[m]
                if c == 0:
                    out.append(zero)
                    continue
                acc = zero
                if m == 0:
                    for u, j in zip(tab.U, nh):
                        acc += u * roots[j]
                else:
                    tneg = tab.tneg
                    for i, u in enumerate(tab.U):
                        acc += u * roots[(nh[i] + m * tneg[i]) % k]
                if c != 1:
                    acc = acc * c
                if not abs(acc.imag) <= tol * (1 + abs(acc.real)):
                    raise EvaluationError(
                        f"A_(k={k},m={m})(n={n}) is not real within tolerance: {acc}"
                    )
                out.append(acc)
        return out

    def term(self, k: int, n: int) -> BigFloat:
        """The k-th term of the series at this evaluator's precision."""
        r, s = self.r, self.s
        rk, sk = gcd(r, k), gcd(s, k)
        cls = self.class_data(rk, sk)
        with workprec(self.prec):
            if cls.mcount == 0:
                return gmpy2.mpfr(0)  # delta_k < 0: empty inner sum, exact zero
            a_vals = self.a_values(k, n)
            n_minus_r = Fraction(n) - Fraction((r - 1) * (s - 1), 24)
            scale = Fraction(rk * sk, r * s)
            pi = gmpy2.const_pi()
            acc = gmpy2.mpfr(0)
            for m in range(cls.mcount):
                x = scale * (cls.delta - m)  # >= 0; == 0 at the m = delta_k boundary
                pref = (2 * pi / k) * sqrt_rational(x / n_minus_r)
                arg = (4 * pi / k) * sqrt_rational(x * n_minus_r)
                acc += pref * a_vals[m].real * bessel_i1(arg, self.prec)
            return acc


_EVALUATORS: Dict[Tuple[int, int, int], _Evaluator] = {}


def _evaluator(r: int, s: int, prec: int) -> _Evaluator:
    key = (r, s, prec)
    ev = _EVALUATORS.get(key)
    if ev is None:
        ev = _EVALUATORS.setdefault(key, _Evaluator(r, s, prec))
    return ev


def a_km(params: HrrParams, k: int, m: int, prec: int) -> BigComplex:
    """A_{k,m}(n) times the integer c_{m,k}, at prec bits.

    The phase of every h-summand is assembled exactly as a rational multiple
    of pi before the single complex exponential; summation runs in ascending
    h.  Requires 0 <= m <= floor(delta_k).
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got k={k}")
    dk = delta_k(params.r, params.s, k)
    if m < 0 or m > dk:
        raise ValueError(f"need 0 <= m <= floor(delta_k) = {dk}, got m={m}")
    return _evaluator(params.r, params.s, prec).a_values(k, params.n)[m]


def term_k(params: HrrParams, k: int, prec: int) -> BigFloat:
    """The k-th series term; exactly 0 (no floating work) when delta_k < 0."""
    if k < 1:
        raise ValueError(f"need k >= 1, got k={k}")
    if params.n <= params.R:
        raise ValueError(f"need n > R = {params.R}, got n={params.n}")
    return _evaluator(params.r, params.s, prec).term(k, params.n)


def _ceil_sqrt(n: int) -> int:
    root = isqrt(max(n, 0))
    return root if root * root == n else root + 1


def _run_series(
    term_fn: Callable[[int], BigFloat],
    *,
    n_start: int,
    n_hard: int,
    window: int,
    fixed_n: Optional[int],
    prec: int,
    keep_trace: bool,
    label: str,
) -> Tuple[int, int, BigFloat, Optional[List[Tuple[int, BigFloat]]]]:
    """Sum terms in ascending k and certify a rounded value.

    Fixed mode sums exactly `fixed_n` terms.  Scan mode sums at least
    `n_start` terms and stops as soon as the rounded partial sum has been
    constant over the last `window` values with residual < 1/2, failing
    loudly past `n_hard`.
    """
    with workprec(prec):
        half = gmpy2.mpfr(1) / 2
        total = gmpy2.mpfr(0)
        trace: Optional[List[Tuple[int, BigFloat]]] = [] if keep_trace else None
        if fixed_n is not None:
            for k in range(1, fixed_n + 1):
                total += term_fn(k)
                if keep_trace:
                    trace.append((k, total))
            value = int(gmpy2.floor(total + half))
            residual = abs(total - value)
            if not residual < half:
                raise EvaluationError(f"{label}: S_{fixed_n} sits exactly between integers")
            return value, fixed_n, residual, trace
        history: deque = deque(maxlen=window)
        for k in range(1, n_hard + 1):
            total += term_fn(k)
            if keep_trace:
                trace.append((k, total))
            value = int(gmpy2.floor(total + half))
            history.append(value)
            if k >= n_start and len(history) == window and all(v == value for v in history):
                residual = abs(total - value)
                if residual < half:
                    return value, k, residual, trace
        residual = abs(total - int(gmpy2.floor(total + half)))
        raise EvaluationError(
            f"{label}: rounded value not stable over a window of {window} "
            f"through N={n_hard} (final residual {float(residual):.6e})"
        )


def evaluate(params: HrrParams, policy: Optional[TruncationPolicy] = None) -> SeriesReport:
    """Sum the series for p_{r,s}(n), round, and certify per the policy.

    Terms accumulate at a fixed precision in ascending k (ties of the inner
    sums broken by ascending m and h), so identical inputs give bit-identical
    reports.  Raises EvaluationError instead of returning an uncertified
    value; raises ValueError when n <= R, where the series does not apply.
    """
    policy = policy or TruncationPolicy()
    r, s, n = params.r, params.s, params.n
    if n <= params.R:
        raise ValueError(f"need n > R = {params.R}, got n={n}")
    if params.is_experimental():
        warnings.warn(
            f"(r,s) = ({r},{s}) is not square-free: series convergence in this "
            f"regime is experimental evidence, not a theorem",
            RuntimeWarning,
            stacklevel=2,
        )
    root = _ceil_sqrt(n)
    window = policy.window if policy.window is not None else r * s
    if policy.N is not None:
        n_hard = policy.N
        n_start = policy.N
    elif policy.N_max is not None:
        n_hard = policy.N_max
        n_start = min(max(4 * root, 2 * r * s), n_hard)
    else:
        # For small n the generic cap 64*ceil(sqrt(n)) can be shorter than
        # one stability window; stretch it so certification stays possible.
        n_start = max(4 * root, 2 * r * s)
        n_hard = max(64 * root, n_start + window)
    prec = policy.precision_bits or choose_precision(params, n_hard)
    ev = _evaluator(r, s, prec)
    value, n_used, residual, trace = _run_series(
        lambda k: ev.term(k, n),
        n_start=n_start,
        n_hard=n_hard,
        window=window,
        fixed_n=policy.N,
        prec=prec,
        keep_trace=policy.keep_trace,
        label=f"p_({r},{s})({n})",
    )
    oracle_checked = False
    if policy.oracle_check:
        expected = oracle_prs(r, s, n)
        if value != expected:
            raise EvaluationError(
                f"series value {value} for p_({r},{s})({n}) disagrees with oracle {expected}"
            )
        oracle_checked = True
    return SeriesReport(value, n_used, residual, trace, prec, oracle_checked)
