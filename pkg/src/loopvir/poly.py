"""Sparse multivariate Laurent polynomials over Gaussian rationals.

The coefficient ring for symbolic loop coordinates: the conformal-radius
variable L (Lambda, integer exponents of either sign), the coordinates
u_1..u_N (nonnegative exponents), and the formal central-charge symbol c.

A monomial is stored sparsely as (lam_exp, c_exp, ((i, e), ...)) where the
u-part is a tuple of (index, exponent) pairs sorted by index with e > 0.
Terms map monomials to nonzero GaussianRational coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .errors import CutoffMismatchError, NotInvertibleError
from .scalar import (
    GaussianRational,
    QI_ONE,
    QI_ZERO,
    format_gaussian,
    format_rational,
    rational_from,
)

Monomial = tuple  # (lam: int, c: int, u: tuple[tuple[int, int], ...])

_UNIT_MONO: Monomial = (0, 0, ())
_RAT_TYPE = type(rational_from(0))


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    u1, u2 = m1[2], m2[2]
    if not u1:
        u = u2
    elif not u2:
        u = u1
    else:
        merged = dict(u1)
        for i, e in u2:
            merged[i] = merged.get(i, 0) + e
        u = tuple(sorted(merged.items()))
    return (m1[0] + m2[0], m1[1] + m2[1], u)


def _mono_weight(m: Monomial) -> int:
    return sum(i * e for i, e in m[2])


def _mono_sort_key(m: Monomial):
    # graded lexicographic: total u+c degree, then exponents by variable id
    deg = sum(e for _, e in m[2]) + m[1]
    return (-deg, -m[0], -m[1], tuple((-i, -e) for i, e in m[2]))


class Grading:
    """Bidegree of a homogeneous polynomial: Lambda degree and u-weight.

    u_n carries weight n; Lambda and c carry weight 0. The grading of a
    product is the componentwise sum.
    """

    __slots__ = ("lambda_degree", "u_weight")

    def __init__(self, lambda_degree: int, u_weight: int):
        object.__setattr__(self, "lambda_degree", lambda_degree)
        object.__setattr__(self, "u_weight", u_weight)

    def __setattr__(self, name, value):
        raise AttributeError("Grading is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Grading)
            and self.lambda_degree == other.lambda_degree
            and self.u_weight == other.u_weight
        )

    def __hash__(self):
        return hash((self.lambda_degree, self.u_weight))

    def __add__(self, other):
        return Grading(
            self.lambda_degree + other.lambda_degree, self.u_weight + other.u_weight
        )

    def __repr__(self):
        return f"Grading(lambda_degree={self.lambda_degree}, u_weight={self.u_weight})"


class CoeffPoly:
    """Immutable sparse polynomial; zero coefficients are never stored."""

    __slots__ = ("cutoff", "terms")

    def __init__(self, cutoff: int, terms: Optional[Mapping[Monomial, GaussianRational]] = None):
        pruned = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff.is_zero():
                    continue
                for i, e in mono[2]:
                    if i < 1 or i > cutoff:
                        raise CutoffMismatchError(
                            f"u_{i} exceeds coordinate cutoff N={cutoff}"
                        )
                    if e < 0:
                        raise ValueError("u variables admit no negative exponents")
                if mono[1] < 0:
                    raise ValueError("c admits no negative exponents")
                pruned[mono] = coeff
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "terms", pruned)

    def __setattr__(self, name, value):
        raise AttributeError("CoeffPoly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(cutoff: int) -> "CoeffPoly":
        return CoeffPoly(cutoff)

    @staticmethod
    def constant(cutoff: int, value) -> "CoeffPoly":
        coeff = value if isinstance(value, GaussianRational) else GaussianRational(value)
        return CoeffPoly(cutoff, {_UNIT_MONO: coeff})

    @staticmethod
    def lam(cutoff: int, power: int = 1) -> "CoeffPoly":
        return CoeffPoly(cutoff, {(power, 0, ()): QI_ONE})

    @staticmethod
    def u(cutoff: int, index: int) -> "CoeffPoly":
        return CoeffPoly(cutoff, {(0, 0, ((index, 1),)): QI_ONE})

    @staticmethod
    def c(cutoff: int) -> "CoeffPoly":
        return CoeffPoly(cutoff, {(0, 1, ()): QI_ONE})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _UNIT_MONO in self.terms)

    def constant_value(self) -> GaussianRational:
        return self.terms.get(_UNIT_MONO, QI_ZERO)

    def u_indices(self) -> set:
        return {i for mono in self.terms for i, _ in mono[2]}

    def max_u_index(self) -> int:
        return max((i for mono in self.terms for i, _ in mono[2]), default=0)

    def _check_compatible(self, other: "CoeffPoly"):
        if self.cutoff != other.cutoff:
            raise CutoffMismatchError(
                f"coordinate cutoffs differ: N={self.cutoff} vs N={other.cutoff}"
            )

    def with_cutoff(self, cutoff: int) -> "CoeffPoly":
        """Reinterpret in the ring with coordinate cutoff `cutoff`."""
        return CoeffPoly(cutoff, self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        self._check_compatible(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = out.get(mono)
            s = coeff if acc is None else acc + coeff
            if s.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = s
        return _raw(self.cutoff, out)

    def __sub__(self, other):
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return _raw(self.cutoff, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)) or type(other) is _RAT_TYPE:
            return self.scale(other)
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        self._check_compatible(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                prod = c1 * c2
                acc = out.get(mono)
                s = prod if acc is None else acc + prod
                if s.is_zero():
                    out.pop(mono, None)
                else:
                    out[mono] = s
        return _raw(self.cutoff, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, value) -> "CoeffPoly":
        coeff = value if isinstance(value, GaussianRational) else GaussianRational(value)
        if coeff.is_zero():
            return CoeffPoly(self.cutoff)
        return _raw(self.cutoff, {m: c * coeff for m, c in self.terms.items()})

    def conjugate(self) -> "CoeffPoly":
        return _raw(self.cutoff, {m: c.conjugate() for m, c in self.terms.items()})

    def substitute_c(self, value) -> "CoeffPoly":
        """Evaluate the central-charge symbol, leaving Lambda and u formal."""
        coeff = value if isinstance(value, GaussianRational) else GaussianRational(value)
        out = {}
        for (lam, ce, u), cval in self.terms.items():
            scaled = cval * coeff**ce if ce else cval
            mono = (lam, 0, u)
            acc = out.get(mono)
            s = scaled if acc is None else acc + scaled
            if s.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = s
        return _raw(self.cutoff, out)

    def __eq__(self, other):
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self.cutoff == other.cutoff and self.terms == other.terms

    __hash__ = None

    # -- evaluation --------------------------------------------------------

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate at scalars; assignment maps "L", "c", "u1".. to values.

        Values may be GaussianRational (exact result) or complex floats
        (float result). Every variable appearing in the polynomial must be
        assigned; Lambda must be nonzero wherever a negative power occurs.
        """
        if not self.terms:
            return QI_ZERO if not _wants_float(assignment) else 0j
        float_mode = _wants_float(assignment)
        total = 0j if float_mode else QI_ZERO
        for (lam, ce, u), coeff in self.terms.items():
            factor = complex(coeff) if float_mode else coeff
            if lam:
                lam_val = _lookup(assignment, "L", float_mode)
                if lam < 0 and (lam_val == 0 if float_mode else lam_val.is_zero()):
                    raise ZeroDivisionError("Lambda = 0 with negative exponent")
                factor = factor * lam_val**lam
            if ce:
                factor = factor * _lookup(assignment, "c", float_mode) ** ce
            for i, e in u:
                factor = factor * _lookup(assignment, f"u{i}", float_mode) ** e
            total = total + factor
        return total

    # -- structure ---------------------------------------------------------

    def grading(self) -> Optional[Grading]:
        """Common grading of all terms, or None when inhomogeneous."""
        if not self.terms:
            raise ValueError("grading of the zero polynomial is undefined")
        gradings = {Grading(m[0], _mono_weight(m)) for m in self.terms}
        if len(gradings) == 1:
            return gradings.pop()
        return None

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _mono_sort_key(kv[0]))

    # -- rendering ---------------------------------------------------------

    def __str__(self):
        return render_poly(self)

    def __repr__(self):
        return f"CoeffPoly(N={self.cutoff}, {render_poly(self)})"

    def to_json_terms(self) -> list:
        out = []
        for mono, coeff in self.sorted_terms():
            exps = {}
            if mono[0]:
                exps["L"] = mono[0]
            if mono[1]:
                exps["c"] = mono[1]
            for i, e in mono[2]:
                exps[f"u{i}"] = e
            out.append(
                {
                    "exponents": exps,
                    "re": format_rational(coeff.re),
                    "im": format_rational(coeff.im),
                }
            )
        return out


def _raw(cutoff: int, terms: dict) -> CoeffPoly:
    p = CoeffPoly.__new__(CoeffPoly)
    object.__setattr__(p, "cutoff", cutoff)
    object.__setattr__(p, "terms", terms)
    return p


def _wants_float(assignment) -> bool:
    return any(isinstance(v, (complex, float)) for v in assignment.values())


def _lookup(assignment, name, float_mode):
    if name not in assignment:
        raise KeyError(f"no value assigned to variable {name}")
    v = assignment[name]
    if float_mode:
        if isinstance(v, (complex, float)):
            return complex(v)
        if isinstance(v, GaussianRational):
            return complex(v)
        return complex(float(v))
    if isinstance(v, GaussianRational):
        return v
    return GaussianRational(v)


# -- rendering ---------------------------------------------------------------


def _render_mono(mono: Monomial) -> str:
    parts = []
    if mono[0]:
        parts.append("L" if mono[0] == 1 else f"L^{mono[0]}")
    if mono[1]:
        parts.append("c" if mono[1] == 1 else f"c^{mono[1]}")
    for i, e in mono[2]:
        parts.append(f"u{i}" if e == 1 else f"u{i}^{e}")
    return "*".join(parts)


def _render_coeff(coeff: GaussianRational) -> str:
    if coeff.is_real() and coeff.re.denominator == 1:
        return str(coeff.re.numerator)
    if coeff.is_real():
        return format_rational(coeff.re)
    return f"({format_gaussian(coeff)})"


def render_poly(p: CoeffPoly) -> str:
    """Canonical text form, e.g. "6*L^-2*(u1^2 - u2)".

    A common monomial and the leading coefficient are factored out when the
    polynomial has several terms, so homogeneous tables read compactly.
    Ordering is graded lexicographic on variable ids, hence deterministic.
    """
    if p.is_zero():
        return "0"
    items = p.sorted_terms()
    if len(items) == 1:
        mono, coeff = items[0]
        body = _render_mono(mono)
        cs = _render_coeff(coeff)
        if not body:
            return cs
        if coeff == QI_ONE:
            return body
        if coeff == -QI_ONE:
            return f"-{body}"
        return f"{cs}*{body}"
    # factor the exponent-wise minimum monomial and the leading coefficient
    lam_min = min(m[0] for m, _ in items)
    c_min = min(m[1] for m, _ in items)
    u_min: dict = None
    for m, _ in items:
        d = dict(m[2])
        if u_min is None:
            u_min = d
        else:
            u_min = {i: min(e, d.get(i, 0)) for i, e in u_min.items() if d.get(i, 0)}
    common = (lam_min, c_min, tuple(sorted((i, e) for i, e in (u_min or {}).items() if e)))
    lead = items[0][1]
    inner = []
    for mono, coeff in items:
        u_red = dict(mono[2])
        for i, e in common[2]:
            u_red[i] -= e
        reduced = (
            mono[0] - common[0],
            mono[1] - common[1],
            tuple(sorted((i, e) for i, e in u_red.items() if e)),
        )
        ratio = coeff / lead
        body = _render_mono(reduced)
        cs = _render_coeff(ratio)
        if not body:
            term = cs
        elif ratio == QI_ONE:
            term = body
        elif ratio == -QI_ONE:
            term = f"-{body}"
        else:
            term = f"{cs}*{body}"
        inner.append(term)
    joined = inner[0]
    for term in inner[1:]:
        if term.startswith("-"):
            joined += f" - {term[1:]}"
        else:
            joined += f" + {term}"
    prefix_mono = _render_mono(common)
    prefix_coeff = _render_coeff(lead)
    prefix = (
        f"{prefix_coeff}*{prefix_mono}" if prefix_mono and prefix_coeff != "1" else
        prefix_mono if prefix_coeff == "1" else prefix_coeff
    )
    if len(inner) == 1:
        return f"{prefix}*{joined}" if prefix else joined
    if prefix in ("", "1"):
        return joined
    return f"{prefix}*({joined})"


# -- derivations --------------------------------------------------------------


def apply_derivation(images, p: CoeffPoly) -> CoeffPoly:
    """Leibniz extension of a coordinate derivation to the whole algebra.

    `images` provides image_lambda and image_u(n); the image of c is 0.
    Requesting a u-image beyond what `images` can supply exactly raises
    TruncationError (never a silent wrong answer).
    """
    if p.cutoff != images.cutoff:
        raise CutoffMismatchError(
            f"derivation built at N={images.cutoff}, polynomial at N={p.cutoff}"
        )
    out = CoeffPoly.zero(p.cutoff)
    for mono, coeff in p.terms.items():
        lam, ce, u = mono
        if lam:
            rest = (lam - 1, ce, u)
            out = out + images.image_lambda * _raw(p.cutoff, {rest: coeff * lam})
        for pos, (i, e) in enumerate(u):
            u_rest = u[:pos] + ((i, e - 1),) + u[pos + 1 :]
            u_rest = tuple(pair for pair in u_rest if pair[1])
            rest = (lam, ce, u_rest)
            out = out + images.image_u(i) * _raw(p.cutoff, {rest: coeff * e})
        # c is central: no contribution from ce
    return out


# -- parsing of simple monomial expressions (CLI targets) ---------------------


def parse_target(text: str, cutoff: int) -> CoeffPoly:
    """Parse products like "1", "L", "L^-2", "u1^2*u2", "c*u1"."""
    text = text.strip()
    if text == "0":
        return CoeffPoly.zero(cutoff)
    result = CoeffPoly.constant(cutoff, 1)
    for factor in text.split("*"):
        factor = factor.strip()
        if not factor:
            raise ValueError(f"empty factor in target {text!r}")
        name, _, exp_s = factor.partition("^")
        exp = int(exp_s) if exp_s else 1
        name = name.strip()
        if name == "1":
            continue
        if name in ("L", "Lambda"):
            result = result * CoeffPoly.lam(cutoff, exp)
        elif name == "c":
            if exp < 0:
                raise ValueError("c admits no negative exponents")
            for _ in range(exp):
                result = result * CoeffPoly.c(cutoff)
        elif name.startswith("u"):
            idx = int(name[1:])
            if exp < 0:
                raise ValueError("u variables admit no negative exponents")
            for _ in range(exp):
                result = result * CoeffPoly.u(cutoff, idx)
        else:
            raise ValueError(f"unknown variable {name!r} in target {text!r}")
    return result


class CoeffPolyRing:
    """Series-coefficient ring adapter for CoeffPoly at a fixed cutoff."""

    name = "poly"

    def __init__(self, cutoff: int):
        self.cutoff = cutoff
        self.zero = CoeffPoly.zero(cutoff)
        self.one = CoeffPoly.constant(cutoff, 1)

    def from_rational(self, q) -> CoeffPoly:
        return CoeffPoly.constant(self.cutoff, GaussianRational(q))

    @staticmethod
    def is_zero(x: CoeffPoly) -> bool:
        return x.is_zero()

    def invert(self, x: CoeffPoly) -> CoeffPoly:
        """Invert units: single terms s*L^j with s a nonzero scalar."""
        if len(x.terms) != 1:
            raise NotInvertibleError(f"not a unit in the coefficient ring: {x}")
        (mono, coeff), = x.terms.items()
        if mono[1] or mono[2]:
            raise NotInvertibleError(
                f"not invertible (u or c factors present): {x}"
            )
        return CoeffPoly(self.cutoff, {(-mono[0], 0, ()): coeff.inverse()})

    @staticmethod
    def conjugate(x: CoeffPoly) -> CoeffPoly:
        return x.conjugate()

    def coerce(self, value) -> CoeffPoly:
        if isinstance(value, CoeffPoly):
            if value.cutoff != self.cutoff:
                raise CutoffMismatchError(
                    f"cutoff mismatch: {value.cutoff} vs {self.cutoff}"
                )
            return value
        return CoeffPoly.constant(self.cutoff, GaussianRational(value))
