"""Exact number-theoretic primitives for eta-quotient transformations.

Dedekind sums, Jacobi symbols, negative modular inverses, and the unit
phases omega(e,f) = exp(pi*i*s(e,f)) and their four-fold ratio Omega_{h,k}
are all computed in exact rational arithmetic.  A Phase is a root of unity
stored as its exponent theta (a rational, exp(pi*i*theta) with 0 <= theta
< 2), so phase assembly contributes zero rounding error; conversion to a
floating complex number happens once, at the edge.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Union

import gmpy2

from .floats import BigComplex, BigFloat, exp_pi_i, workprec

__all__ = [
    "ExactRational",
    "Phase",
    "dedekind_sum",
    "dedekind_sum_definition",
    "omega",
    "mod_inverse_neg",
    "jacobi",
    "is_squarefree",
    "omega_ratio",
    "omega_ratio_closed",
    "eta_transform_check",
]

# Exact rationals are plain stdlib Fractions: always lowest terms, positive
# denominator, arbitrary-precision integer parts.
ExactRational = Fraction


def dedekind_sum(e: int, f: int) -> Fraction:
    """The Dedekind sum s(e,f), by the O(log f) reciprocity descent.

    s(e,f) = sum_{j=1}^{f-1} (j/f)((ej/f) - floor(ej/f) - 1/2) for coprime
    e, f; it depends on e only modulo f.  The descent applies the
    reciprocity law s(e,f) + s(f,e) = -1/4 + (e/f + f/e + 1/(ef))/12
    alternately with the mod reduction, exactly like a gcd ladder.  This is
    the production path; `dedekind_sum_definition` is the direct oracle.
    """
    if f < 1:
        raise ValueError(f"dedekind_sum needs f >= 1, got f={f}")
    a, b = e % f, f
    if gcd(a, b) != 1:
        raise ValueError(f"dedekind_sum needs gcd(e,f) = 1, got gcd({e},{f}) = {gcd(e, f)}")
    # Accumulate the alternating reciprocity terms (a^2+b^2+1)/(12ab) - 1/4
    # over a running common denominator; one reduction at the end is much
    # cheaper than normalizing a Fraction at every step.
    num, den = 0, 1
    sign = 1
    while a:
        t_num = a * a + b * b + 1 - 3 * a * b
        t_den = 12 * a * b
        num = num * t_den + sign * t_num * den
        den *= t_den
        a, b = b % a, a
        sign = -sign
    return Fraction(num, den)


def dedekind_sum_definition(e: int, f: int) -> Fraction:
    """s(e,f) straight from the defining sum, in O(f) integer operations.

    sum_j j*((ej) mod f) is accumulated as one integer; the sawtooth
    rewrites to that accumulator divided by f^2, minus (f-1)/4.
    """
    if f < 1:
        raise ValueError(f"dedekind_sum_definition needs f >= 1, got f={f}")
    if gcd(e, f) != 1:
        raise ValueError(f"dedekind_sum_definition needs gcd(e,f) = 1, got gcd({e},{f}) = {gcd(e, f)}")
    acc = sum(j * ((e * j) % f) for j in range(1, f))
    return Fraction(acc, f * f) - Fraction(f - 1, 4)


class Phase:
    """A root of unity exp(pi*i*theta) with exact rational exponent theta.

    The exponent is always reduced to [0, 2); multiplication and division
    add and subtract exponents mod 2.  Equality is exact.
    """

    __slots__ = ("exponent",)

    def __init__(self, exponent: Union[int, Fraction]):
        self.exponent = Fraction(exponent) % 2

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.exponent + other.exponent)

    def __truediv__(self, other: "Phase") -> "Phase":
        return Phase(self.exponent - other.exponent)

    def __pow__(self, k: int) -> "Phase":
        return Phase(self.exponent * k)

    def conjugate(self) -> "Phase":
        return Phase(-self.exponent)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Phase):
            return NotImplemented
        return self.exponent == other.exponent

    def __hash__(self):
        return hash(("Phase", self.exponent))

    def to_complex(self, prec: int) -> BigComplex:
        """One rounding: evaluate exp(pi*i*theta) at `prec` bits."""
        with workprec(prec):
            return exp_pi_i(self.exponent)

    def __repr__(self) -> str:
        return f"Phase({self.exponent})"


def omega(e: int, f: int) -> Phase:
    """omega(e,f) = exp(pi*i*s(e,f)) as an exact Phase."""
    if f == 1:
        # Empty defining sum; also covers the h=0, k=1 convention.
        return Phase(0)
    return Phase(dedekind_sum(e, f))


def mod_inverse_neg(h: int, k: int) -> int:
    """The canonical H in [0, k) with h*H = -1 (mod k); H = 0 when k = 1."""
    if k < 1:
        raise ValueError(f"mod_inverse_neg needs k >= 1, got k={k}")
    if gcd(h, k) != 1:
        raise ValueError(f"mod_inverse_neg needs gcd(h,k) = 1, got gcd({h},{k}) = {gcd(h, k)}")
    if k == 1:
        return 0
    return (-pow(h, -1, k)) % k


def jacobi(a: int, b: int) -> int:
    """Jacobi symbol (a|b) for odd positive b, via quadratic reciprocity."""
    if b < 1 or b % 2 == 0:
        raise ValueError(f"jacobi needs an odd positive modulus, got b={b}")
    a %= b
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                result = -result
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            result = -result
        a %= b
    return result if b == 1 else 0


def is_squarefree(x: int) -> bool:
    """True when no prime square divides x (x >= 1)."""
    if x < 1:
        raise ValueError(f"is_squarefree needs x >= 1, got {x}")
    p = 2
    while p * p <= x:
        if x % (p * p) == 0:
            return False
        while x % p == 0:
            x //= p
        p += 1 if p == 2 else 2
    return True


def _check_pair(r: int, s: int) -> None:
    if r < 2 or s < 2:
        raise ValueError(f"need r, s >= 2, got r={r}, s={s}")
    if gcd(r, s) != 1:
        raise ValueError(f"need gcd(r,s) = 1, got gcd({r},{s}) = {gcd(r, s)}")


def omega_ratio(h: int, k: int, r: int, s: int) -> Phase:
    """Omega_{h,k} = omega(h,k) omega(rsh/g, k/g) / (omega(rh/r_k, k/r_k) omega(sh/s_k, k/s_k)).

    Here r_k = gcd(r,k), s_k = gcd(s,k), g = r_k*s_k.  Each of the four
    omega arguments is automatically coprime to its modulus (every common
    prime would have to divide both a quotient of r or s by its gcd part and
    the matching quotient of k, which the gcd construction rules out), so no
    square-freeness of r or s is required; this keeps the ratio usable in
    the experimental non-square-free regime.
    """
    if k < 1:
        raise ValueError(f"omega_ratio needs k >= 1, got k={k}")
    _check_pair(r, s)
    h %= k
    if gcd(h, k) != 1:
        raise ValueError(f"omega_ratio needs gcd(h,k) = 1, got gcd({h},{k}) = {gcd(h, k)}")
    rk, sk = gcd(r, k), gcd(s, k)
    g = rk * sk
    num = omega(h, k) * omega(h * r * s // g, k // g)
    den = omega(h * r // rk, k // rk) * omega(h * s // sk, k // sk)
    return num / den


def omega_ratio_closed(h: int, k: int, r: int, s: int) -> Phase:
    """Omega_{h,k} by the closed form: Jacobi symbols and one exponential.

    Write 24rs = A*B with A the largest divisor of 24rs coprime to k (so B
    collects exactly the primes shared with k), let Abar invert A mod Bk,
    and pick H with h*H = -1 (mod Bk) and A | H (possible since
    gcd(A, Bk) = 1).  With nu_k = (r_k-1)(s_k-1), sigma_k = (r-r_k)(s-s_k),
    R = (r-1)(s-1)/24 and delta_k = (r/r_k - r_k)(s/s_k - s_k)/24, the ratio
    equals a Jacobi-symbol sign times exp(pi*i*theta) for an explicitly
    rational theta; the two parities of k take different forms.  Requires
    square-free r and s (the even-k branch needs r/r_k and s/s_k odd) and is
    used as a cross-check of `omega_ratio`, which must agree exactly.
    """
    if k < 1:
        raise ValueError(f"omega_ratio_closed needs k >= 1, got k={k}")
    if h < 1:
        raise ValueError(f"omega_ratio_closed needs h >= 1, got h={h}")
    _check_pair(r, s)
    if not (is_squarefree(r) and is_squarefree(s)):
        raise ValueError(f"omega_ratio_closed needs square-free r and s, got ({r},{s})")
    if gcd(h, k) != 1:
        raise ValueError(f"omega_ratio_closed needs gcd(h,k) = 1, got gcd({h},{k}) = {gcd(h, k)}")
    rk, sk = gcd(r, k), gcd(s, k)
    R = Fraction((r - 1) * (s - 1), 24)
    dk = Fraction((r // rk - rk) * (s // sk - sk), 24)
    A = 24 * r * s
    while True:
        g = gcd(A, k)
        if g == 1:
            break
        A //= g
    B = 24 * r * s // A
    Abar = pow(A, -1, B * k)
    # H = -h^{-1} mod Bk, lifted to a multiple of A (CRT; gcd(A, Bk) = 1).
    Hbk = (-pow(h, -1, B * k)) % (B * k)
    t = (-Hbk * pow(B * k % A, -1, A)) % A if A > 1 else 0
    H = Hbk + B * k * t
    nu = (rk - 1) * (sk - 1)
    sigma = (r - rk) * (s - sk)
    phi = Fraction(48 * Abar * H) * (k * k * R - rk * sk * dk) / (B * k)
    if k % 2 == 1:
        sign = jacobi(r // rk, sk) * jacobi(s // sk, rk)
        theta = Fraction(-k * nu, 4 * rk * sk) - Fraction(2 * h, k * rk * sk) * (
            k * k * dk - rk * sk * R
        ) + phi
    else:
        sign = jacobi(sk, r // rk) * jacobi(rk, s // sk)
        theta = Fraction(2 * h, k * rk * sk) * (
            2 * k * k * dk + Fraction(k * sigma, 8) + rk * sk * R
        ) + phi
    return Phase(theta if sign == 1 else theta + 1)


def _eta_truncated(tau: BigComplex, M: int) -> BigComplex:
    # exp(pi*i*tau/12) * prod_{j=1}^{M} (1 - q^j), q = exp(2*pi*i*tau)
    i_pi_tau = gmpy2.mpc(0, 1) * gmpy2.const_pi() * tau
    q = gmpy2.exp(2 * i_pi_tau)
    prod = gmpy2.mpc(1)
    qj = gmpy2.mpc(1)
    for _ in range(M):
        qj *= q
        prod *= 1 - qj
    return gmpy2.exp(i_pi_tau / 12) * prod


def eta_transform_check(a: int, b: int, c: int, d: int, tau, M: int, prec: int) -> BigFloat:
    """Residual |eta((a*tau+b)/(c*tau+d)) - eps * sqrt(-i(c*tau+d)) * eta(tau)|.

    Both sides use M-factor truncated products at `prec` bits; the phase is
    eps = exp(pi*i*((a+d)/(12c) + s(-d,c))) and the square root takes the
    principal branch.  A small residual validates the Dedekind-sum and
    branch conventions used across the package; truncation limits how small
    the residual can get, so callers should pick tau with Im(tau) and
    Im((a*tau+b)/(c*tau+d)) well away from 0.
    """
    if a * d - b * c != 1:
        raise ValueError(f"eta_transform_check needs ad - bc = 1, got {a * d - b * c}")
    if c <= 0:
        raise ValueError(f"eta_transform_check needs c > 0, got c={c}")
    if M < 1:
        raise ValueError(f"eta_transform_check needs M >= 1, got M={M}")
    with workprec(prec):
        z = gmpy2.mpc(tau)
        if not z.imag > 0:
            raise ValueError(f"eta_transform_check needs Im(tau) > 0, got {z.imag}")
        moebius = (a * z + b) / (c * z + d)
        lhs = _eta_truncated(moebius, M)
        eps = exp_pi_i(Fraction(a + d, 12 * c) + dedekind_sum(-d, c))
        root = gmpy2.sqrt(gmpy2.mpc(0, -1) * (c * z + d))
        rhs = eps * root * _eta_truncated(z, M)
        return abs(lhs - rhs)
