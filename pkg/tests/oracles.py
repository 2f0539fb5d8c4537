"""Naive reference implementations used as independent test oracles.

Everything works on plain {exponent: coefficient} dicts with
straight-line algorithms (term-by-term convolution, coefficient-matching
reversion, textbook Schwarzian), deliberately sharing nothing with the
package's series kernel beyond the coefficient-ring primitives.
"""

from fractions import Fraction

from loopvir.scalar import EXACT


def nadd(a, b, ring=EXACT):
    out = dict(a)
    for m, c in b.items():
        out[m] = out[m] + c if m in out else c
    return {m: c for m, c in out.items() if not ring.is_zero(c)}


def nneg(a):
    return {m: -c for m, c in a.items()}


def nscale(a, scalar):
    return {m: c * scalar for m, c in a.items()}


def nmul(a, b, order, ring=EXACT):
    out = {}
    for i, ca in a.items():
        for j, cb in b.items():
            if i + j > order:
                continue
            out[i + j] = out[i + j] + ca * cb if i + j in out else ca * cb
    return {m: c for m, c in out.items() if not ring.is_zero(c)}


def ndiv(a, b, order, ring=EXACT):
    """Schoolbook long division, lowest exponent first."""
    if not b:
        raise ZeroDivisionError
    vb = min(b)
    lead_inv = ring.invert(b[vb])
    va = min(a) if a else order + 1
    out = {}
    rem = dict(a)
    for m in range(va - vb, order + 1):
        num = rem.get(m + vb)
        if num is None or ring.is_zero(num):
            continue
        q = num * lead_inv
        out[m] = q
        for j, cb in b.items():
            k = m + j
            rem[k] = rem[k] - q * cb if k in rem else -(q * cb)
    return out


def nderiv(a, ring=EXACT):
    return {
        m - 1: c * ring.from_rational(Fraction(m)) for m, c in a.items() if m != 0
    }


def nschwarzian(f, order, ring=EXACT):
    d1 = nderiv(f, ring)
    d2 = nderiv(d1, ring)
    d3 = nderiv(d2, ring)
    first = ndiv(d3, d1, order, ring)
    ratio = ndiv(d2, d1, order, ring)
    sq = nmul(ratio, ratio, order, ring)
    threehalf = ring.from_rational(Fraction(3, 2))
    return nadd(first, nneg(nscale(sq, threehalf)), ring)


def ncompose(outer, inner, order, ring=EXACT):
    """Sum of outer coefficients times powers of inner (valuation >= 1)."""
    out = {}
    power = {0: ring.one}
    for m in range(0, max(outer) + 1):
        c = outer.get(m)
        if c is not None:
            for j, pj in power.items():
                if j <= order:
                    out[j] = out[j] + c * pj if j in out else c * pj
        power = nmul(power, inner, order, ring)
    return {m: c for m, c in out.items() if not ring.is_zero(c)}


def nrevert(f, order, ring=EXACT):
    """Coefficient matching: solve f(g(z)) = z degree by degree."""
    a1_inv = ring.invert(f[1])
    g = {1: a1_inv}
    for n in range(2, order + 1):
        residual = ncompose(f, g, n, ring)
        value = residual.get(n)
        if value is None or ring.is_zero(value):
            continue
        g[n] = -(value * a1_inv)
    return g


def series_to_dict(s):
    return {m: s.coeff(m) for m in s.known_exponents() if not s.ring.is_zero(s.coeff(m))}


def dicts_equal(a, b, order, ring=EXACT):
    for m in range(min([*a, *b, 0]), order + 1):
        ca = a.get(m, ring.zero)
        cb = b.get(m, ring.zero)
        if not ring.is_zero(ca - cb):
            return False
    return True
