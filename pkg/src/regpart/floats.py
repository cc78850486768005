"""Precision-tagged real and complex arithmetic on top of gmpy2.

Every floating computation in this package runs under an explicit binary
precision installed with `workprec`.  gmpy2 rounds each operation at the
precision of the *active context*, not of the operands, so the discipline is:
enter `workprec(bits)`, do the arithmetic, and let results carry the tag out.
A fresh context is installed each time, which pins the rounding mode to the
default round-to-nearest-even and makes results reproducible bit for bit.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction
from typing import Iterator, Union

import gmpy2

# Public aliases: arbitrary-precision real / complex scalars.
BigFloat = gmpy2.mpfr
BigComplex = gmpy2.mpc

Rational = Union[int, Fraction, gmpy2.mpq]

#: Extra bits used inside iterative kernels (Bessel series, products) so that
#: accumulated rounding stays below one ulp of the requested output precision.
GUARD_BITS = 32

#: Smallest working precision accepted anywhere in the package.
MIN_PRECISION = 8


@contextlib.contextmanager
def workprec(bits: int) -> Iterator[gmpy2.context]:
    """Run a block with the active gmpy2 context set to `bits` of precision.

    The previous context is restored on exit, even on exceptions.  Contexts
    are thread-local in gmpy2, so concurrent callers do not interfere.
    """
    if bits < MIN_PRECISION:
        raise ValueError(f"working precision must be >= {MIN_PRECISION} bits, got {bits}")
    saved = gmpy2.get_context()
    gmpy2.set_context(gmpy2.context(precision=int(bits)))
    try:
        yield gmpy2.get_context()
    finally:
        gmpy2.set_context(saved)


def to_float(x: Rational) -> BigFloat:
    """Round an exact rational (or int) once, at the active precision."""
    if isinstance(x, Fraction):
        x = gmpy2.mpq(x.numerator, x.denominator)
    return gmpy2.mpfr(x)


def exp_pi_i(theta: Rational) -> BigComplex:
    """exp(pi*i*theta) for exact rational theta, at the active precision.

    The exponent is reduced modulo 2 exactly before the single rounding to
    mpfr, so huge rational exponents lose no accuracy.
    """
    theta = theta % 2
    sin_, cos_ = gmpy2.sin_cos(to_float(theta) * gmpy2.const_pi())
    return gmpy2.mpc(cos_, sin_)


def sqrt_rational(x: Rational) -> BigFloat:
    """sqrt of a non-negative exact rational: one rounding, then one sqrt."""
    if x < 0:
        raise ValueError(f"sqrt_rational needs a non-negative argument, got {x}")
    return gmpy2.sqrt(to_float(x))
