"""Truncated power series over exact integers.

Everything here is exact: series coefficients are Python ints, products and
quotients are schoolbook convolutions, and infinite products (x^t;x^t)_inf
are expanded through the pentagonal number theorem rather than term-by-term
multiplication.  The module supplies

  * the generating function G(x) whose x^n coefficient is p_{r,s}(n), the
    number of partitions of n into parts divisible by neither r nor s,
  * an independent dynamic-programming oracle for the same counts, and
  * the integer coefficient tables c_{m,k} of the eta quotient
    (x^a;x^a)(x^b;x^b)/((x^c;x^c)(x^d;x^d)) attached to a divisor class
    (r_k, s_k) = (gcd(r,k), gcd(s,k)).
"""

from __future__ import annotations

from math import gcd
from typing import Dict, List, Tuple

__all__ = [
    "IntSeries",
    "series_mul",
    "series_div",
    "euler_product",
    "generating_coeffs",
    "oracle_prs",
    "cmk_coeffs",
    "default_cmk_order",
]


class IntSeries:
    """A power series with integer coefficients, truncated at x^M.

    `coeffs[j]` is the coefficient of x^j for 0 <= j <= M and
    `truncation_order` is M; the list always has exactly M + 1 entries.
    Arithmetic between two IntSeries truncates at the smaller order.
    """

    __slots__ = ("coeffs", "truncation_order")

    def __init__(self, coeffs, truncation_order: int | None = None):
        coeffs = [int(c) for c in coeffs]
        if truncation_order is None:
            if not coeffs:
                raise ValueError("an IntSeries needs at least the x^0 coefficient")
            truncation_order = len(coeffs) - 1
        if truncation_order < 0:
            raise ValueError(f"truncation_order must be >= 0, got {truncation_order}")
        if len(coeffs) > truncation_order + 1:
            raise ValueError(
                f"{len(coeffs)} coefficients exceed truncation order {truncation_order}"
            )
        coeffs.extend([0] * (truncation_order + 1 - len(coeffs)))
        self.coeffs = coeffs
        self.truncation_order = truncation_order

    @classmethod
    def one(cls, truncation_order: int) -> "IntSeries":
        """The constant series 1 at the given order."""
        return cls([1], truncation_order)

    def coeff(self, j: int) -> int:
        if not 0 <= j <= self.truncation_order:
            raise IndexError(f"coefficient x^{j} outside truncation order {self.truncation_order}")
        return self.coeffs[j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntSeries):
            return NotImplemented
        return (
            self.truncation_order == other.truncation_order and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.truncation_order, tuple(self.coeffs)))

    def __mul__(self, other: "IntSeries") -> "IntSeries":
        return series_mul(self, other)

    def __truediv__(self, other: "IntSeries") -> "IntSeries":
        return series_div(self, other)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if self.truncation_order >= 8 else ""
        return f"IntSeries([{head}{tail}], order={self.truncation_order})"


def series_mul(a: IntSeries, b: IntSeries) -> IntSeries:
    """Cauchy product truncated at min(a.order, b.order), exact integers."""
    order = min(a.truncation_order, b.truncation_order)
    out = [0] * (order + 1)
    bc = b.coeffs
    for i, ai in enumerate(a.coeffs):
        if i > order:
            break
        if ai == 0:
            continue
        for j in range(min(order - i, b.truncation_order) + 1):
            bj = bc[j]
            if bj:
                out[i + j] += ai * bj
    return IntSeries(out, order)


def series_div(a: IntSeries, b: IntSeries) -> IntSeries:
    """Quotient q with q*b = a up to the truncation order.

    Requires b to have constant term +1 or -1, which keeps every quotient
    coefficient an exact integer (all series used here are eta-type products
    with constant term 1).
    """
    b0 = b.coeffs[0]
    if b0 not in (1, -1):
        raise ValueError(f"series_div needs a unit constant term (+1 or -1), got {b0}")
    order = min(a.truncation_order, b.truncation_order)
    # Only the nonzero higher coefficients of b enter the recurrence; the
    # divisors here are pentagonal-sparse, so collect them once.
    nz = [(j, bj) for j, bj in enumerate(b.coeffs[1 : order + 1], start=1) if bj]
    q = [0] * (order + 1)
    ac = a.coeffs
    for n in range(order + 1):
        acc = ac[n]
        for j, bj in nz:
            if j > n:
                break
            acc -= bj * q[n - j]
        q[n] = acc * b0  # dividing by +-1 is multiplying by it
    return IntSeries(q, order)


def euler_product(t: int, M: int) -> IntSeries:
    """(x^t;x^t)_inf truncated at M via the pentagonal number theorem.

    The expansion is sum over all integers l of (-1)^l x^{t*l(3l-1)/2}; only
    O(sqrt(M/t)) exponents land below the truncation order, so no
    product-of-factors expansion is ever performed.
    """
    if t < 1:
        raise ValueError(f"euler_product needs t >= 1, got {t}")
    if M < 0:
        raise ValueError(f"truncation order must be >= 0, got {M}")
    out = [0] * (M + 1)
    out[0] = 1
    l = 1
    while True:
        hit = False
        for ll in (l, -l):
            e = t * ll * (3 * ll - 1) // 2
            if e <= M:
                out[e] += -1 if l % 2 else 1
                hit = True
        if not hit:
            break
        l += 1
    return IntSeries(out, M)


def generating_coeffs(r: int, s: int, M: int) -> IntSeries:
    """G(x) = (x^r;x^r)(x^s;x^s) / ((x;x)(x^{rs};x^{rs})) truncated at M.

    For coprime r, s the coefficient of x^n counts the partitions of n into
    parts divisible by neither r nor s.
    """
    if r < 2 or s < 2:
        raise ValueError(f"need r, s >= 2, got r={r}, s={s}")
    if gcd(r, s) != 1:
        raise ValueError(f"need gcd(r,s) = 1, got gcd({r},{s}) = {gcd(r, s)}")
    num = series_mul(euler_product(r, M), euler_product(s, M))
    q = series_div(num, euler_product(1, M))
    return series_div(q, euler_product(r * s, M))


# Bottom-up part-counting tables, keyed (r, s, cap) with cap a power of two so
# each key is written exactly once (write-once map, safe for concurrent reads).
_DP_CACHE: Dict[Tuple[int, int, int], List[int]] = {}


def _dp_table(r: int, s: int, cap: int) -> List[int]:
    key = (r, s, cap)
    table = _DP_CACHE.get(key)
    if table is None:
        dp = [0] * (cap + 1)
        dp[0] = 1
        for part in range(1, cap + 1):
            if part % r == 0 or part % s == 0:
                continue
            for total in range(part, cap + 1):
                dp[total] += dp[total - part]
        table = _DP_CACHE.setdefault(key, dp)
    return table


def oracle_prs(r: int, s: int, n: int) -> int:
    """Exact p_{r,s}(n) by dynamic programming over allowed parts.

    Classic coin-counting recurrence over the parts {j <= n : r does not
    divide j and s does not divide j}; independent of all series machinery,
    so it serves as a second opinion on the generating function and on the
    convergent series.  Deliberately does not require gcd(r,s) = 1 or
    square-freeness, so it also covers the experimental regime.
    """
    if r < 2 or s < 2:
        raise ValueError(f"need r, s >= 2, got r={r}, s={s}")
    if n < 0:
        raise ValueError(f"need n >= 0, got n={n}")
    if n == 0:
        return 1
    cap = 64
    while cap < n:
        cap *= 2
    return _dp_table(r, s, cap)[n]


def default_cmk_order(r: int, s: int) -> int:
    """Default truncation for c_{m,k} tables: max(32, ceil(2*delta_1)).

    The inner sums of the convergent series only ever need m <= floor(delta_k)
    <= floor(delta_1) = floor((r-1)(s-1)/24), so twice that (floored at 32)
    leaves generous headroom.
    """
    return max(32, -((-2 * (r - 1) * (s - 1)) // 24))


# c_{m,k} tables, keyed by the full argument tuple.  Production callers use a
# single default order per (r,s), so the key effectively degenerates to the
# divisor class (r_k, s_k); every key is written once.
_CMK_CACHE: Dict[Tuple[int, int, int, int, int], List[int]] = {}


def cmk_coeffs(r: int, s: int, r_k: int, s_k: int, M: int) -> IntSeries:
    """Coefficients c_{m,k} of (x^a;x^a)(x^b;x^b)/((x^c;x^c)(x^d;x^d)).

    Here a = r_k*s/s_k, b = s_k*r/r_k, c = r*s/(r_k*s_k), d = r_k*s_k; the
    series depends on k only through the divisor pair (r_k, s_k) =
    (gcd(r,k), gcd(s,k)).  Results are cached; the returned IntSeries owns a
    fresh coefficient list, so callers may mutate it freely.
    """
    if r < 2 or s < 2:
        raise ValueError(f"need r, s >= 2, got r={r}, s={s}")
    if r_k < 1 or r % r_k != 0:
        raise ValueError(f"r_k = {r_k} is not a positive divisor of r = {r}")
    if s_k < 1 or s % s_k != 0:
        raise ValueError(f"s_k = {s_k} is not a positive divisor of s = {s}")
    if M < 0:
        raise ValueError(f"truncation order must be >= 0, got {M}")
    key = (r, s, r_k, s_k, M)
    coeffs = _CMK_CACHE.get(key)
    if coeffs is None:
        a = r_k * s // s_k
        b = s_k * r // r_k
        c = r * s // (r_k * s_k)
        d = r_k * s_k
        num = series_mul(euler_product(a, M), euler_product(b, M))
        q = series_div(num, euler_product(c, M))
        coeffs = _CMK_CACHE.setdefault(key, series_div(q, euler_product(d, M)).coeffs)
    return IntSeries(list(coeffs), M)
