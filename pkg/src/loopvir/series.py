"""Truncated Laurent series over a generic coefficient ring.

A TruncSeries stores the exact coefficients a_v..a_M of
sum_{m=v}^{M} a_m z^m + O(z^{M+1}); every operation tracks the tightest
provable truncation order of its result, so a coefficient is either exact
or unavailable (TruncationError), never silently wrong.

Coefficient rings are supplied as adapter objects exposing zero/one,
from_rational, is_zero, invert, conjugate, coerce; elements themselves
carry +, -, *.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .errors import NotInvertibleError, TruncationError


class TruncSeries:
    """Immutable truncated Laurent series; see module docstring.

    Invariant: coeffs[0] is nonzero unless the series is identically zero
    to its order, in which case coeffs is empty and valuation = order + 1.
    """

    __slots__ = ("ring", "valuation", "order", "coeffs")

    def __init__(self, ring, valuation: int, coeffs, order: int):
        coeffs = list(coeffs)
        # strip exact leading zeros (the valuation is computed, not declared)
        while coeffs and ring.is_zero(coeffs[0]):
            coeffs.pop(0)
            valuation += 1
        while coeffs and ring.is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            valuation = order + 1
        elif valuation + len(coeffs) - 1 > order:
            raise ValueError("coefficients extend beyond the declared order")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("TruncSeries is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_terms(ring, terms: Mapping[int, object], order: int) -> "TruncSeries":
        """Series with the given exponent -> coefficient terms, exact to `order`."""
        if not terms:
            return TruncSeries(ring, order + 1, [], order)
        lo = min(terms)
        hi = max(terms)
        if hi > order:
            raise ValueError("term exponent beyond declared order")
        coeffs = [terms.get(m, ring.zero) for m in range(lo, hi + 1)]
        return TruncSeries(ring, lo, coeffs, order)

    @staticmethod
    def zero(ring, order: int) -> "TruncSeries":
        return TruncSeries(ring, order + 1, [], order)

    @staticmethod
    def identity(ring, order: int) -> "TruncSeries":
        return TruncSeries.from_terms(ring, {1: ring.one}, order)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, m: int):
        """Exact coefficient of z^m; TruncationError beyond the order."""
        if m > self.order:
            raise TruncationError(
                f"coefficient of z^{m} requested but series is only exact to "
                f"order {self.order}"
            )
        if not self.coeffs or m < self.valuation or m > self.valuation + len(self.coeffs) - 1:
            return self.ring.zero
        return self.coeffs[m - self.valuation]

    def known_exponents(self):
        return range(self.valuation, self.valuation + len(self.coeffs))

    def truncate(self, order: int) -> "TruncSeries":
        if order >= self.order:
            return self
        keep = [c for m, c in zip(self.known_exponents(), self.coeffs) if m <= order]
        return TruncSeries(self.ring, self.valuation, keep, order)

    def map_coeffs(self, fn: Callable) -> "TruncSeries":
        return TruncSeries(self.ring, self.valuation, [fn(c) for c in self.coeffs], self.order)

    def conjugate_coeffs(self) -> "TruncSeries":
        return self.map_coeffs(self.ring.conjugate)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        order = min(self.order, other.order)
        terms = {}
        for m, c in zip(self.known_exponents(), self.coeffs):
            if m <= order:
                terms[m] = c
        for m, c in zip(other.known_exponents(), other.coeffs):
            if m <= order:
                terms[m] = terms[m] + c if m in terms else c
        return TruncSeries.from_terms(self.ring, terms, order)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        order = min(self.order + other.valuation, other.order + self.valuation)
        val = self.valuation + other.valuation
        width = order - val + 1
        if width <= 0 or not self.coeffs or not other.coeffs:
            return TruncSeries.zero(self.ring, order)
        out = [self.ring.zero] * width
        for i, a in enumerate(self.coeffs):
            if self.ring.is_zero(a):
                continue
            if i >= width:
                break
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= width:
                    break
                out[k] = out[k] + a * b
        return TruncSeries(self.ring, val, out, order)

    def scale(self, scalar) -> "TruncSeries":
        """Multiply every coefficient by a ring element or rational."""
        if isinstance(scalar, (int, Fraction)):
            scalar = self.ring.from_rational(Fraction(scalar))
        return self.map_coeffs(lambda a: a * scalar)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by z^k."""
        return TruncSeries(self.ring, self.valuation + k, self.coeffs, self.order + k)

    def differentiate(self) -> "TruncSeries":
        terms = {}
        for m, c in zip(self.known_exponents(), self.coeffs):
            if m != 0:
                terms[m - 1] = c * self.ring.from_rational(Fraction(m))
        return TruncSeries.from_terms(self.ring, terms, self.order - 1)

    def residue(self):
        """Coefficient of z^-1 (valuation must reach below zero or it is 0)."""
        return self.coeff(-1)

    def __truediv__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return divide(self, other)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.valuation == other.valuation
            and self.order == other.order
            and len(self.coeffs) == len(other.coeffs)
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )

    __hash__ = None

    # -- rendering ---------------------------------------------------------

    def __str__(self):
        if self.is_zero():
            return f"0 + O(z^{self.order + 1})"
        parts = []
        for m, c in zip(self.known_exponents(), self.coeffs):
            if self.ring.is_zero(c):
                continue
            cs = str(c)
            if any(ch in cs for ch in "+-*") and not cs.lstrip("-").isdigit():
                cs = f"({cs})"
            if m == 0:
                parts.append(cs)
            elif m == 1:
                parts.append(f"{cs}*z")
            else:
                parts.append(f"{cs}*z^{m}")
        return " + ".join(parts) + f" + O(z^{self.order + 1})"

    def __repr__(self):
        return f"TruncSeries({self})"

    def to_json(self) -> dict:
        return {
            "valuation": self.valuation if self.coeffs else None,
            "order": self.order,
            "coeffs": [
                {"power": m, "value": str(c)}
                for m, c in zip(self.known_exponents(), self.coeffs)
            ],
        }


def series_equal(a: TruncSeries, b: TruncSeries) -> bool:
    """Exact agreement of all coefficients up to the common provable order."""
    order = min(a.order, b.order)
    lo = min(a.valuation, b.valuation)
    if lo > order:
        return True
    for m in range(lo, order + 1):
        if not a.ring.is_zero(a.coeff(m) - b.coeff(m)):
            return False
    return True


def divide(num: TruncSeries, den: TruncSeries) -> TruncSeries:
    """Long division; den's leading coefficient must be a unit."""
    ring = num.ring
    if den.is_zero():
        raise NotInvertibleError("division by a series that is zero to its order")
    try:
        lead_inv = ring.invert(den.coeffs[0])
    except NotInvertibleError as exc:
        raise NotInvertibleError(
            f"leading coefficient of divisor is not invertible: {den.coeffs[0]}"
        ) from exc
    if num.is_zero():
        return TruncSeries.zero(ring, num.order - den.valuation)
    rel = min(num.order - num.valuation, den.order - den.valuation)
    val = num.valuation - den.valuation
    q = [ring.zero] * (rel + 1)
    den_c = den.coeffs
    for j in range(rel + 1):
        acc = num.coeffs[j] if j < len(num.coeffs) else ring.zero
        upper = min(j, len(den_c) - 1)
        for i in range(1, upper + 1):
            acc = acc - den_c[i] * q[j - i]
        q[j] = acc * lead_inv
    return TruncSeries(ring, val, q, val + rel)


def reciprocal(s: TruncSeries) -> TruncSeries:
    """1/s with honest order bookkeeping (relative precision preserved)."""
    one = TruncSeries.from_terms(s.ring, {0: s.ring.one}, s.order - s.valuation)
    return divide(one, s)


def int_power(s: TruncSeries, e: int) -> TruncSeries:
    """s**e for integer e (negative e via reciprocal of the positive power)."""
    if e == 0:
        return TruncSeries.from_terms(s.ring, {0: s.ring.one}, s.order - s.valuation)
    if e < 0:
        return reciprocal(int_power(s, -e))
    out = s
    for _ in range(e - 1):
        out = out * s
    return out


def compose(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    """outer(inner(z)) for inner of valuation >= 1.

    Laurent outers (finitely many negative powers) are allowed since the
    inner is then invertible as a series. For exactly-known polynomial
    outers composed with valuation-0 inners use compose_polynomial.
    """
    ring = outer.ring
    if inner.is_zero():
        if outer.valuation < 0:
            raise NotInvertibleError("negative powers of an identically zero inner")
        order = inner.order  # O(z^{Mi+1}) enters linearly through outer'
        const = outer.coeff(0) if outer.valuation <= 0 <= outer.order else ring.zero
        return TruncSeries.from_terms(ring, {0: const}, order)
    q = inner.valuation
    if q < 1:
        raise ValueError(
            "compose requires inner valuation >= 1; use compose_polynomial for "
            "exactly-known polynomial outers"
        )
    vo, mo, mi = outer.valuation, outer.order, inner.order
    order = min(q * (mo + 1) - 1, mi + q * (vo - 1))
    work = order
    inner_t = inner.truncate(work) if work < inner.order else inner
    # Horner on the nonnegative part, then the negative part in 1/inner
    result = TruncSeries.zero(ring, work)
    if mo >= 0:
        for m in range(mo, -1, -1):
            result = (result * inner_t).truncate(work)
            c = outer.coeff(m) if m >= vo else ring.zero
            if not ring.is_zero(c):
                result = result + TruncSeries.from_terms(ring, {0: c}, work)
    if vo < 0:
        inv = reciprocal(inner_t).truncate(work + 2 * q)
        neg = TruncSeries.zero(ring, work)
        for m in range(vo, 0):
            neg = (neg * inv).truncate(work + q)
            c = outer.coeff(m)
            if not ring.is_zero(c):
                neg = neg + TruncSeries.from_terms(ring, {0: c}, work + q)
        result = result + (neg * inv).truncate(work)
    return result.truncate(order)


def compose_polynomial(outer_terms: Mapping[int, object], inner: TruncSeries, order: int) -> TruncSeries:
    """Evaluate an exactly-known Laurent polynomial at a series.

    Unlike compose, the outer has no truncation tail, so the inner may have
    valuation 0 (it must be invertible when negative exponents occur).
    """
    ring = inner.ring
    if inner.valuation < 0:
        raise ValueError("compose_polynomial requires inner valuation >= 0")
    work = order
    inner_t = inner.truncate(work)
    result = TruncSeries.zero(ring, work)
    non_neg = sorted((m for m in outer_terms if m >= 0), reverse=True)
    if non_neg:
        for m in range(non_neg[0], -1, -1):
            result = (result * inner_t).truncate(work)
            c = outer_terms.get(m)
            if c is not None and not ring.is_zero(c):
                result = result + TruncSeries.from_terms(ring, {0: c}, work)
    negs = sorted(m for m in outer_terms if m < 0)
    if negs:
        inv = reciprocal(inner_t)
        neg = TruncSeries.zero(ring, work)
        for m in range(negs[0], 0):
            neg = (neg * inv).truncate(work + 1)
            c = outer_terms.get(m)
            if c is not None and not ring.is_zero(c):
                neg = neg + TruncSeries.from_terms(ring, {0: c}, neg.order)
        result = result + (neg * inv).truncate(work)
    return result.truncate(order)


def revert(f: TruncSeries) -> TruncSeries:
    """Compositional inverse of a valuation-1 series.

    Newton iteration g <- g - (f(g) - z)/f'(g), doubling accuracy each
    step; the leading coefficient must be a unit. compose(f, revert(f))
    equals z through the full order.
    """
    ring = f.ring
    if f.valuation != 1:
        raise ValueError(f"revert requires valuation exactly 1, got {f.valuation}")
    lead_inv = ring.invert(f.coeffs[0])
    order = f.order
    fp = f.differentiate()
    g = TruncSeries.from_terms(ring, {1: lead_inv}, order)
    identity = TruncSeries.identity(ring, order)
    # accuracy doubles per step, so this count always suffices; float
    # residuals are never exactly zero, hence no early-exit test
    for _ in range(max(1, order.bit_length() + 1)):
        residual = (compose(f, g) - identity).truncate(order)
        if residual.is_zero() and residual.order >= order:
            return g
        correction = divide(residual, compose(fp, g))
        g = (g - correction).truncate(order)
    return g


def binomial_series(x: TruncSeries, p: Fraction, order: int) -> TruncSeries:
    """(1+x)^p for x of valuation >= 1, exact binomial coefficients."""
    ring = x.ring
    if not x.is_zero() and x.valuation < 1:
        raise ValueError("binomial_series requires valuation >= 1")
    x = x.truncate(order)
    result = TruncSeries.from_terms(ring, {0: ring.one}, order)
    term = TruncSeries.from_terms(ring, {0: ring.one}, order)
    coeff = Fraction(1)
    q = x.valuation if x.coeffs else order + 1
    m = 0
    while (m + 1) * q <= order:
        m += 1
        coeff *= Fraction(p - (m - 1), m)
        if coeff == 0:
            break
        term = (term * x).truncate(order)
        if term.is_zero():
            break
        result = result + term.scale(coeff)
    return result


def rational_power(f: TruncSeries, p) -> TruncSeries:
    """f**p for rational p; requires constant term exactly 1."""
    ring = f.ring
    p = Fraction(p.numerator, p.denominator) if not isinstance(p, Fraction) else p
    if f.valuation != 0 or not (f.coeffs and ring.is_zero(f.coeffs[0] - ring.one)):
        raise ValueError("rational_power requires a series with constant term 1")
    x = f - TruncSeries.from_terms(ring, {0: ring.one}, f.order)
    return binomial_series(x, p, f.order)


def schwarzian(f: TruncSeries) -> TruncSeries:
    """S[f] = f'''/f' - (3/2)(f''/f')^2 as a truncated Laurent series."""
    ring = f.ring
    d1 = f.differentiate()
    d2 = d1.differentiate()
    d3 = d2.differentiate()
    first = divide(d3, d1)
    ratio = divide(d2, d1)
    half3 = ring.from_rational(Fraction(3, 2))
    return first - (ratio * ratio).map_coeffs(lambda c: c * half3)


def schwarzian_chain_check(phi: TruncSeries, psi: TruncSeries) -> bool:
    """Exact check of S[phi o psi] = (S[phi] o psi) * psi'^2 + S[psi]."""
    lhs = schwarzian(compose(phi, psi))
    dpsi = psi.differentiate()
    rhs = compose(schwarzian(phi), psi) * dpsi * dpsi + schwarzian(psi)
    return series_equal(lhs, rhs)


class SeriesAtInfinity:
    """Expansion at w = infinity, stored as a TruncSeries in s = 1/w.

    F(w) = tail(1/w); the leading power of w is -tail.valuation. All
    computations are delegated to the underlying series after the
    substitution.
    """

    __slots__ = ("tail",)

    def __init__(self, tail: TruncSeries):
        object.__setattr__(self, "tail", tail)

    def __setattr__(self, name, value):
        raise AttributeError("SeriesAtInfinity is immutable")

    @property
    def ring(self):
        return self.tail.ring

    @property
    def leading_power(self) -> int:
        return -self.tail.valuation

    def coeff_of_w(self, m: int):
        """Coefficient of w^m = s^-m."""
        return self.tail.coeff(-m)

    def __str__(self):
        return str(self.tail).replace("z", "w^-1")

    def __repr__(self):
        return f"SeriesAtInfinity({self.tail!r})"
