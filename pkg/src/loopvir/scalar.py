"""Exact scalars: arbitrary-precision rationals and Gaussian rationals.

The series and polynomial layers are generic over a small scalar contract
(zero/one/from_rational/invert/conjugate plus the arithmetic operators);
this module provides the two scalar instantiations, exact Gaussian
rationals and double-precision complex floats.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction

from .errors import DomainError, NotInvertibleError

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Rational = Fraction

RAT_ZERO = Rational(0)
RAT_ONE = Rational(1)


def rational_from(value) -> Rational:
    """Coerce ints, Fractions, strings "p/q", or Rationals to Rational."""
    if isinstance(value, str):
        return Rational(value)
    return Rational(value)


def format_rational(q) -> str:
    """Render as "p/q", always with an explicit denominator."""
    return f"{q.numerator}/{q.denominator}"


_RATIONAL_RE = r"[+-]?\d+(?:/\d+)?"
_GAUSSIAN_RE = _re.compile(
    rf"^\s*(?P<re>{_RATIONAL_RE})\s*(?:(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)\s*\*\s*i)?\s*$"
)


def parse_rational(text: str) -> Rational:
    q = Rational(text.strip())
    return q


class GaussianRational:
    """An exact complex scalar a+bi with rational a, b.

    Instances are immutable values; arithmetic is exact and the field
    axioms hold structurally (equality is component-wise equality of
    reduced rationals).
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rational_from(re))
        object.__setattr__(self, "im", rational_from(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return GaussianRational(a * c, RAT_ZERO)
            return GaussianRational(a * c, a * d)
        if not d:
            return GaussianRational(a * c, b * c)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero GaussianRational")
        n = other.re * other.re + other.im * other.im
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (GaussianRational(1) / self) ** (-n)
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "GaussianRational":
        return GaussianRational(1) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Rational:
        """|x|^2 as an exact nonnegative rational."""
        return self.re * self.re + self.im * self.im

    # -- comparisons and conversions --------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_gaussian(self)


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)) or type(value) is type(RAT_ZERO):
        return GaussianRational(value)
    return NotImplemented


QI_ZERO = GaussianRational(0)
QI_ONE = GaussianRational(1)
QI_I = GaussianRational(0, 1)


def format_gaussian(z: GaussianRational) -> str:
    """Render as "p/q" when real, else "p/q+r/s*i" (or with '-')."""
    if z.is_real():
        return format_rational(z.re)
    sign = "-" if z.im < 0 else "+"
    return f"{format_rational(z.re)}{sign}{format_rational(abs(z.im))}*i"


def parse_gaussian(text: str) -> GaussianRational:
    """Parse the grammar emitted by format_gaussian ("p/q", "p/q+r/s*i")."""
    m = _GAUSSIAN_RE.match(text)
    if not m:
        raise ValueError(f"not a Gaussian rational literal: {text!r}")
    re_part = Rational(m.group("re"))
    if m.group("im") is None:
        return GaussianRational(re_part)
    im_part = Rational(m.group("im"))
    if m.group("sign") == "-":
        im_part = -im_part
    return GaussianRational(re_part, im_part)


def central_charge(kappa) -> Rational:
    """Central charge c(kappa) = (6-kappa)(3kappa-8)/(2kappa), kappa > 0."""
    k = rational_from(kappa)
    if k <= 0:
        raise DomainError(f"central_charge requires kappa > 0, got {k}")
    return (6 - k) * (3 * k - 8) / (2 * k)


class ExactScalars:
    """Ring adapter for GaussianRational coefficients."""

    name = "exact"
    zero = QI_ZERO
    one = QI_ONE

    @staticmethod
    def from_rational(q) -> GaussianRational:
        return GaussianRational(q)

    @staticmethod
    def is_zero(x) -> bool:
        return x.is_zero()

    @staticmethod
    def invert(x):
        if x.is_zero():
            raise NotInvertibleError("zero is not invertible")
        return x.inverse()

    @staticmethod
    def conjugate(x):
        return x.conjugate()

    @staticmethod
    def coerce(value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("cannot coerce a float complex into the exact ring")
        return GaussianRational(value)


class FloatScalars:
    """Ring adapter for double-precision complex coefficients.

    Exact equality on floats is never used in verification; callers in the
    loops module compare against tolerances.
    """

    name = "f64"
    zero = 0j
    one = 1 + 0j

    @staticmethod
    def from_rational(q) -> complex:
        return complex(float(q))

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0

    @staticmethod
    def invert(x):
        if x == 0:
            raise NotInvertibleError("zero is not invertible")
        return 1 / x

    @staticmethod
    def conjugate(x):
        return complex(x).conjugate()

    @staticmethod
    def coerce(value) -> complex:
        if isinstance(value, GaussianRational):
            return complex(value)
        return complex(value)


EXACT = ExactScalars()
FLOAT = FloatScalars()
