"""Quadratic surds and isolated quadratic roots, exact where it is cheap.

Crossings of two degree-(1,1) rational curves solve a rational quadratic, so
every abscissa the envelope needs is either rational or ``A + B*sqrt(D)``.
Signs of such numbers are decided exactly by squaring; only sums over
different radicands fall back to certified rational enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union


def rational_sqrt(d: Fraction) -> Fraction | None:
    """Exact square root of ``d >= 0`` when it is rational, else ``None``."""
    if d < 0:
        return None
    n, m = isqrt(d.numerator), isqrt(d.denominator)
    if n * n == d.numerator and m * m == d.denominator:
        return Fraction(n, m)
    return None


def sqrt_enclosure(d: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= sqrt(d) <= hi`` with ``hi - lo <= 2**-bits / den(d)``."""
    P, Q = d.numerator, d.denominator
    scale = 1 << bits
    root = isqrt(P * Q * scale * scale)
    lo = Fraction(root, scale * Q)
    if root * root == P * Q * scale * scale:
        return lo, lo
    return lo, Fraction(root + 1, scale * Q)


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def surd_sign(a: Fraction, b: Fraction, d: Fraction) -> int:
    """Exact sign of ``a + b*sqrt(d)`` for ``d >= 0``."""
    sa, sb = _sign(a), _sign(b) if d else 0
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    lhs, rhs = a * a, b * b * d
    if lhs == rhs:
        return 0
    return sa if lhs > rhs else sb


@dataclass(frozen=True)
class Surd:
    """``a + b*sqrt(d)`` with rational ``a, b`` and positive rational ``d``."""

    a: Fraction
    b: Fraction
    d: Fraction

    def __add__(self, other: "Surd | Fraction") -> "Surd":
        if isinstance(other, Surd):
            if other.b and self.b and other.d != self.d:
                raise ValueError("cannot add surds over different radicands")
            d = self.d if self.b else other.d
            return Surd(self.a + other.a, self.b + other.b, d)
        return Surd(self.a + other, self.b, self.d)

    def __neg__(self) -> "Surd":
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other: "Surd | Fraction") -> "Surd":
        return self + (-other)

    def sign(self) -> int:
        return surd_sign(self.a, self.b, self.d)

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        if not self.b:
            return self.a, self.a
        lo, hi = sqrt_enclosure(self.d, bits)
        x, y = self.a + self.b * lo, self.a + self.b * hi
        return (x, y) if x <= y else (y, x)


@dataclass(frozen=True)
class QuadraticRoot:
    """The root ``-b/2 + sign*sqrt(b*b/4 - c)`` of ``x*x + b*x + c``.

    Only irrational roots are stored this way; rational roots are returned as
    plain fractions by :func:`real_roots`.  Two instances denote the same
    number exactly when their fields agree, because an irrational root pins
    down its monic minimal polynomial.
    """

    b: Fraction
    c: Fraction
    sign: int

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        return Fraction(1), self.b, self.c

    @property
    def disc(self) -> Fraction:
        return self.b * self.b / 4 - self.c

    def as_surd(self) -> Surd:
        return Surd(-self.b / 2, Fraction(self.sign), self.disc)

    def isolating_interval(self, bits: int = 8) -> tuple[Fraction, Fraction]:
        return self.as_surd().enclosure(bits)

    def describe(self) -> dict:
        lo, hi = self.isolating_interval(16)
        return {
            "kind": "quadratic",
            "coefficients": [str(c) for c in self.coefficients],
            "sign": self.sign,
            "isolating_interval": [str(lo), str(hi)],
        }


Abscissa = Union[Fraction, QuadraticRoot]


def real_roots(a: Fraction, b: Fraction, c: Fraction) -> list[Abscissa]:
    """Distinct real roots of ``a x^2 + b x + c`` in increasing order.

    The zero polynomial has no isolated roots and yields ``[]``.
    """
    if a == 0:
        if b == 0:
            return []
        return [-c / b]
    bm, cm = b / a, c / a
    disc = bm * bm / 4 - cm
    if disc < 0:
        return []
    if disc == 0:
        return [-bm / 2]
    root = rational_sqrt(disc)
    if root is not None:
        return [-bm / 2 - root, -bm / 2 + root]
    return [QuadraticRoot(bm, cm, -1), QuadraticRoot(bm, cm, 1)]


def compare(x: Abscissa, y: Abscissa) -> int:
    """Exact three-way comparison of two abscissae."""
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return _sign(x - y)
    if isinstance(x, QuadraticRoot) and isinstance(y, Fraction):
        return (x.as_surd() - y).sign()
    if isinstance(x, Fraction):
        return -compare(y, x)
    if x == y:
        return 0
    sx, sy = x.as_surd(), y.as_surd()
    if sx.d == sy.d:
        return (sx - sy).sign()
    # distinct irrational roots differ, so refinement terminates
    bits = 8
    while True:
        xl, xh = sx.enclosure(bits)
        yl, yh = sy.enclosure(bits)
        if xh < yl:
            return -1
        if yh < xl:
            return 1
        bits *= 2


def rational_between(x: Abscissa | None, y: Abscissa | None) -> Fraction:
    """A rational strictly between ``x < y``; ``None`` stands for an infinite end."""
    if x is None and y is None:
        return Fraction(0)
    if x is None:
        return _floor_below(y) - 1
    if y is None:
        return _ceil_above(x) + 1
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return (x + y) / 2
    bits = 8
    while True:
        xl, xh = _enc(x, bits)
        yl, yh = _enc(y, bits)
        if xh < yl:
            return (xh + yl) / 2
        bits *= 2


def _enc(x: Abscissa, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(x, Fraction):
        return x, x
    return x.isolating_interval(bits)


def _floor_below(x: Abscissa) -> Fraction:
    return Fraction(_enc(x, 4)[0].__floor__())


def _ceil_above(x: Abscissa) -> Fraction:
    return Fraction(_enc(x, 4)[1].__ceil__())


def approx(x: Abscissa) -> float:
    if isinstance(x, Fraction):
        return float(x)
    lo, hi = x.isolating_interval(40)
    return float((lo + hi) / 2)
