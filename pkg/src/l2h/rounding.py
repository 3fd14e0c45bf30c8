"""Directed rounding of rationals and of their real roots.

Every ``*_down`` helper returns a rational not above the true value and
every ``*_up`` helper one not below it.  Roots are enclosed with integer
roots of suitably scaled integers, so nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

DEFAULT_BITS = 60


def iroot_floor(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0:
        raise ValueError("root of a negative integer")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return isqrt(n)
    # Newton from above, starting at a power of two that exceeds the root
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def iroot_ceil(n: int, k: int) -> int:
    r = iroot_floor(n, k)
    return r if r ** k == n else r + 1


def _scale_exponent(q: Fraction, k: int, bits: int) -> int:
    # choose e so that q * 2**(k*e) has about k*bits bits before the root
    if q == 0:
        return 0
    mag = q.numerator.bit_length() - q.denominator.bit_length()
    return max(0, bits - mag // k)


def root_down(q, k: int, bits: int = DEFAULT_BITS) -> Fraction:
    """Rational lower bound for q**(1/k), q >= 0."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("root of a negative number")
    if q == 0:
        return Fraction(0)
    e = _scale_exponent(q, k, bits)
    n = (q.numerator << (k * e)) // q.denominator
    return Fraction(iroot_floor(n, k), 1 << e)


def root_up(q, k: int, bits: int = DEFAULT_BITS) -> Fraction:
    """Rational upper bound for q**(1/k), q >= 0."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("root of a negative number")
    if q == 0:
        return Fraction(0)
    e = _scale_exponent(q, k, bits)
    num = q.numerator << (k * e)
    n = -((-num) // q.denominator)
    return Fraction(iroot_ceil(n, k), 1 << e)


def sqrt_down(q, bits: int = DEFAULT_BITS) -> Fraction:
    return root_down(q, 2, bits)


def sqrt_up(q, bits: int = DEFAULT_BITS) -> Fraction:
    return root_up(q, 2, bits)


def floor_to(q, den: int) -> Fraction:
    """Largest multiple of 1/den not above q."""
    q = Fraction(q)
    return Fraction((q.numerator * den) // q.denominator, den)


def ceil_to(q, den: int) -> Fraction:
    q = Fraction(q)
    return Fraction(-((-q.numerator * den) // q.denominator), den)


def to_json(q):
    if q is None:
        return None
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator), "approx": f"{float(q):.10g}"}


def from_json(d):
    if d is None:
        return None
    return Fraction(int(d["num"]), int(d["den"]))
