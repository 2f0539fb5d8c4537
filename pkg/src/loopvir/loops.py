"""Concrete loops, numeric Neretin evaluation, and flow oracles.

A loop is given through its interior data: the conformal radius lam > 0
and the coordinates u_n of the normalized map f(z) = lam*z*(1 + sum u_n
z^n). Built-in families (circles, perturbed disks) enforce closed-form
univalence bounds; arbitrary interior series are accepted as formal data
with the necessary coefficient bound |u_n| <= n+1 enforced as a warning
(or rejection with strict=True). Exterior loops carry the at-infinity
expansion of g^{-1} and only support the Q-side operations.
"""

from __future__ import annotations

import cmath
import warnings
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from .errors import DomainError, TruncationError
from .neretin import neretin_table, neretin_q_from_exterior
from .scalar import EXACT, FLOAT, GaussianRational, QI_ONE, rational_from
from .series import SeriesAtInfinity, TruncSeries, compose, compose_polynomial, revert
from .witt import flow_series, witt_generator

Scalar = Union[GaussianRational, complex]


def _is_float_mode(values) -> bool:
    return any(isinstance(v, (complex, float)) for v in values)


class LoopSpec:
    """Base for concrete loops; see module docstring."""

    mode = "exact"

    @property
    def is_interior(self) -> bool:
        return True

    def lam(self) -> Scalar:
        raise NotImplementedError

    def u_coeff(self, n: int) -> Scalar:
        raise NotImplementedError

    def u_vector(self, count: int) -> List[Scalar]:
        return [self.u_coeff(n) for n in range(1, count + 1)]

    def interior_series(self, order: int) -> TruncSeries:
        """The normalized map as a series exact to the given order."""
        ring = FLOAT if self.mode == "f64" else EXACT
        lam = self.lam()
        terms = {1: lam}
        for n in range(1, order):
            c = self.u_coeff(n)
            value = lam * c
            if not ring.is_zero(value):
                terms[n + 1] = value
        return TruncSeries.from_terms(ring, terms, order)

    def scaled(self, factor) -> "LoopSpec":
        """The image loop under z -> factor*z, factor > 0 (rational or float)."""
        if self.mode == "f64":
            factor = float(factor)
            if factor <= 0:
                raise DomainError("scaling factor must be positive")
            return InteriorSeriesLoop(self.lam() * factor, self._u_list(), strict=False)
        factor = rational_from(factor)
        if factor <= 0:
            raise DomainError("scaling factor must be positive")
        return InteriorSeriesLoop(
            self.lam() * GaussianRational(factor), self._u_list(), strict=False
        )

    def _u_list(self) -> List[Scalar]:
        raise NotImplementedError

    def data_count(self) -> Optional[int]:
        """Number of stored coordinates; None when all are closed-form."""
        return None

    def to_float(self) -> "LoopSpec":
        if self.mode == "f64":
            return self
        return InteriorSeriesLoop(
            complex(self.lam()), [complex(u) for u in self._u_list()], strict=False
        )

    def describe(self) -> str:
        raise NotImplementedError


def _check_positive_real(lam, mode: str):
    if mode == "f64":
        if not isinstance(lam, complex):
            lam = complex(lam)
        if abs(lam.imag) > 1e-12 * max(1.0, abs(lam.real)) or lam.real <= 0:
            raise DomainError(f"conformal radius must be real positive, got {lam}")
    else:
        if not lam.is_real() or lam.re <= 0:
            raise DomainError(f"conformal radius must be real positive, got {lam}")


class InteriorSeriesLoop(LoopSpec):
    """Loop given by finitely many coordinates; f is exactly a polynomial."""

    def __init__(self, lam, u: Sequence, strict: bool = False):
        values = list(u)
        self.mode = "f64" if _is_float_mode([lam, *values]) else "exact"
        if self.mode == "f64":
            lam = complex(lam).real
            values = [complex(v) for v in values]
        else:
            lam = lam if isinstance(lam, GaussianRational) else GaussianRational(lam)
            values = [v if isinstance(v, GaussianRational) else GaussianRational(v) for v in values]
        _check_positive_real(
            lam if self.mode == "exact" else complex(lam), self.mode
        )
        self._lam = lam
        self._u = values
        self._police_coefficients(strict)

    def _police_coefficients(self, strict: bool):
        # |u_n| <= n+1 is necessary for any actual loop (coefficient bound
        # of normalized univalent maps); violations are formal data only.
        for n, v in enumerate(self._u, start=1):
            bad = (
                abs(v) > n + 1 + 1e-12
                if self.mode == "f64"
                else v.abs2() > rational_from((n + 1) ** 2)
            )
            if bad:
                msg = f"|u_{n}| > {n + 1}: not the coordinates of any loop"
                if strict:
                    raise DomainError(msg)
                warnings.warn(msg, stacklevel=3)

    def lam(self):
        if self.mode == "f64":
            return complex(self._lam)
        return self._lam

    def u_coeff(self, n: int):
        if 1 <= n <= len(self._u):
            return self._u[n - 1]
        return 0j if self.mode == "f64" else GaussianRational(0)

    def _u_list(self):
        return list(self._u)

    def data_count(self) -> int:
        return len(self._u)

    def describe(self) -> str:
        us = ",".join(str(v) for v in self._u)
        return f"iseries:{self._lam};{us}"


class CircleLoop(LoopSpec):
    """Circle of radius r centered at a with |a| < r (so 0 is inside).

    The normalized map is the Moebius map a + r(z - a/r)/(1 - (conj a/r)z);
    coordinates come out in closed form: lam = r - |a|^2/r and
    u_n = (-conj(a)/r)^n. All Neretin values vanish.
    """

    def __init__(self, center, radius):
        self.mode = "f64" if _is_float_mode([center, radius]) else "exact"
        if self.mode == "f64":
            self._a = complex(center)
            self._r = float(radius)
            if self._r <= 0 or abs(self._a) >= self._r:
                raise DomainError("circle requires |a| < r and r > 0")
        else:
            self._a = center if isinstance(center, GaussianRational) else GaussianRational(center)
            self._r = rational_from(radius)
            if self._r <= 0 or self._a.abs2() >= self._r * self._r:
                raise DomainError("circle requires |a| < r and r > 0")

    def lam(self):
        if self.mode == "f64":
            return complex(self._r - abs(self._a) ** 2 / self._r)
        return GaussianRational(self._r) - self._a.abs2() / GaussianRational(self._r)

    def u_coeff(self, n: int):
        if self.mode == "f64":
            return (-self._a.conjugate() / self._r) ** n
        base = -self._a.conjugate() / GaussianRational(self._r)
        return base**n

    def _u_list(self):
        raise DomainError("circle coordinates are a closed form; scale via CircleLoop")

    def scaled(self, factor) -> "CircleLoop":
        if self.mode == "f64":
            f = float(factor)
            if f <= 0:
                raise DomainError("scaling factor must be positive")
            return CircleLoop(self._a * f, self._r * f)
        f = rational_from(factor)
        if f <= 0:
            raise DomainError("scaling factor must be positive")
        return CircleLoop(self._a * GaussianRational(f), self._r * f)

    def to_float(self) -> "CircleLoop":
        if self.mode == "f64":
            return self
        return CircleLoop(complex(self._a), float(self._r))

    def describe(self) -> str:
        return f"circle:{self._a},{self._r}"


class PerturbedDiskLoop(LoopSpec):
    """f(z) = z + eps*z^m with |eps|*m < 1 (univalence margin)."""

    def __init__(self, eps, m: int):
        if m < 2:
            raise DomainError("perturbed disk requires m >= 2")
        self.mode = "f64" if _is_float_mode([eps]) else "exact"
        if self.mode == "f64":
            self._eps = complex(eps)
            if abs(self._eps) * m >= 1:
                raise DomainError("perturbed disk requires |eps|*m < 1")
        else:
            self._eps = eps if isinstance(eps, GaussianRational) else GaussianRational(eps)
            if self._eps.abs2() * (m * m) >= 1:
                raise DomainError("perturbed disk requires |eps|*m < 1")
        self._m = m

    def lam(self):
        return 1 + 0j if self.mode == "f64" else GaussianRational(1)

    def u_coeff(self, n: int):
        if n == self._m - 1:
            return self._eps
        return 0j if self.mode == "f64" else GaussianRational(0)

    def _u_list(self):
        return [self.u_coeff(n) for n in range(1, self._m)]

    def data_count(self) -> int:
        return self._m - 1

    def to_float(self) -> "PerturbedDiskLoop":
        if self.mode == "f64":
            return self
        return PerturbedDiskLoop(complex(self._eps), self._m)

    def describe(self) -> str:
        return f"pdisk:{self._eps},{self._m}"


class ExteriorSeriesLoop(LoopSpec):
    """Loop known through the at-infinity expansion of g^{-1}."""

    def __init__(self, data: SeriesAtInfinity, mode: str):
        self.data = data
        self.mode = mode

    @property
    def is_interior(self) -> bool:
        return False

    def lam(self):
        raise DomainError("exterior loop has no interior data")

    def u_coeff(self, n: int):
        raise DomainError("exterior loop has no interior data")

    def interior_series(self, order: int) -> TruncSeries:
        raise DomainError("exterior loop has no interior data")

    def describe(self) -> str:
        return f"exterior:leading_power={self.data.leading_power}"


# -- Neretin evaluation --------------------------------------------------------


def eval_p(loop: LoopSpec, k_max: int) -> List[Scalar]:
    """P_0..P_K at the loop, via evaluation of the symbolic table."""
    if not loop.is_interior:
        raise DomainError("eval_p requires interior data; exterior loops carry Q only")
    table = neretin_table(k_max)
    assignment = {"L": loop.lam(), "c": 0}
    for n in range(1, table.n_coords + 1):
        assignment[f"u{n}"] = loop.u_coeff(n)
    return [table[k].evaluate(assignment) for k in range(k_max + 1)]


def eval_q_exterior(loop: ExteriorSeriesLoop, k_max: int) -> List[Scalar]:
    if loop.is_interior:
        raise DomainError("eval_q_exterior expects an exterior loop")
    return neretin_q_from_exterior(loop.data, k_max)


def inverse_coefficients(loop: LoopSpec, count: int) -> List[Scalar]:
    """Coefficients v_1..v_count of f^{-1}(w) = lam^{-1} w (1 + sum v_k w^k)."""
    f = loop.interior_series(count + 1)
    finv = revert(f)
    lead = finv.coeff(1)
    return [finv.coeff(k + 1) / lead for k in range(1, count + 1)]


def tau_transform(loop: LoopSpec, order: int = 14) -> ExteriorSeriesLoop:
    """Exterior data of the reflected loop tau(gamma), tau(z) = 1/conj(z).

    With f^{-1}(zeta) = sum b_k zeta^k the reflected loop's exterior map
    satisfies g~^{-1}(w) = sum conj(b_k) w^{-k}; conjugation is exact in
    exact mode.
    """
    if not loop.is_interior:
        raise DomainError("tau_transform needs interior data")
    finv = revert(loop.interior_series(order))
    return ExteriorSeriesLoop(SeriesAtInfinity(finv.conjugate_coeffs()), loop.mode)


def pq_tau_check(loop: LoopSpec, k_max: int, tolerance: float = 1e-10) -> dict:
    """Check Q_k[tau(gamma)] = conj(P_k[gamma]) for k <= K.

    Exact equality in exact mode; |difference| <= tolerance * max(1, |P_k|)
    in float mode. The two sides go through independent code paths (table
    evaluation vs reflection + at-infinity Schwarzian).
    """
    p_values = eval_p(loop, k_max)
    exterior = tau_transform(loop, order=k_max + 1)
    q_values = neretin_q_from_exterior(exterior.data, k_max)
    rows = []
    ok = True
    for k in range(k_max + 1):
        expected = (
            p_values[k].conjugate()
            if loop.mode == "exact"
            else complex(p_values[k]).conjugate()
        )
        got = q_values[k]
        if loop.mode == "exact":
            match = got == expected
            err = None
        else:
            err = abs(complex(got) - complex(expected))
            match = err <= tolerance * max(1.0, abs(complex(expected)))
        ok = ok and match
        rows.append({"k": k, "pass": match, "error": err})
    return {"loop": loop.describe(), "K": k_max, "rows": rows, "pass": ok}


def bieberbach_check(loop: LoopSpec, k_max: int) -> dict:
    """|v_k| * lam^k <= (k+1) 4^k for k <= K, exactly, on exact loops.

    The scale-normalized inverse coefficients of any loop whose interior
    contains the ball of radius lam/4 obey this bound; built-in exact
    families must satisfy it at every order.
    """
    if loop.mode != "exact":
        raise DomainError("bieberbach_check runs on exact loops")
    vs = inverse_coefficients(loop, k_max)
    lam = loop.lam().re
    rows = []
    ok = True
    for k, v in enumerate(vs, start=1):
        bound = rational_from((k + 1) * 4**k)
        lhs = v.abs2() * lam ** (2 * k)
        match = lhs <= bound * bound
        ok = ok and match
        rows.append({"k": k, "pass": match})
    return {"loop": loop.describe(), "K": k_max, "rows": rows, "pass": ok}


# -- flows on loops -------------------------------------------------------------


def flow_image(loop: LoopSpec, k: int, t, order: Optional[int] = None,
               imaginary: bool = False) -> LoopSpec:
    """Interior data of the image loop under the index-k flow at time t.

    k >= 1 composes the flow with f (exact for rational t); k = 0 rescales
    (phi) or rotates coordinates (psi), float time only; k = -1 translates
    and renormalizes by a disk automorphism, float mode only. k <= -2 is
    rejected: the image's normalized map needs genuine numeric conformal
    mapping, a declared non-goal.
    """
    if not loop.is_interior:
        raise DomainError("flows act on interior data")
    if k <= -2:
        raise DomainError("flow_image supports k >= -1 only")
    if _time_is_zero(t):
        return loop
    if order is None:
        order = max(8, (loop.data_count() or 8) + 4)
    if k >= 1:
        float_mode = loop.mode == "f64" or isinstance(t, (float, complex))
        src = loop.to_float() if float_mode else loop
        tt = complex(t) if float_mode else t
        flow = flow_series(k, tt, order, imaginary=imaginary)
        image = compose(flow, src.interior_series(order))
        return _loop_from_series(image, order, "f64" if float_mode else "exact")
    if k == 0:
        if not isinstance(t, (float, complex)) or (isinstance(t, complex) and t.imag):
            raise DomainError("k = 0 flows take real float time; rescale exactly via scaled()")
        t = float(t.real) if isinstance(t, complex) else float(t)
        fl = loop.to_float()
        count = fl.data_count() or order
        us = [fl.u_coeff(n) for n in range(1, count + 1)]
        if imaginary:
            new_us = [u * cmath.exp(1j * n * t) for n, u in enumerate(us, start=1)]
            return InteriorSeriesLoop(complex(fl.lam()).real, new_us, strict=False)
        return InteriorSeriesLoop(complex(fl.lam()).real * cmath.exp(-t).real, us, strict=False)
    # k == -1: translation by t (or i t), then renormalization
    if not isinstance(t, (float, complex)):
        raise DomainError("k = -1 flow needs float time (renormalization is transcendental)")
    fl = loop.to_float()
    shift = 1j * float(t) if imaginary else complex(t)
    work = order + 4
    f = fl.interior_series(work)
    finv = revert(f)
    alpha = _eval_series(finv, shift)
    f_terms = {m: f.coeff(m) for m in f.known_exponents()}
    fprime_terms = {m - 1: m * c for m, c in f_terms.items()}
    for _ in range(3):  # Newton polish of f(alpha) = shift
        fa = _eval_terms(f_terms, alpha)
        fpa = _eval_terms(fprime_terms, alpha)
        alpha = alpha - (fa - shift) / fpa
    if abs(alpha) >= 1:
        raise DomainError("renormalization failed: |f^{-1}(t)| >= 1")
    fprime_alpha = _eval_terms(fprime_terms, alpha)
    theta = -cmath.phase(fprime_alpha)
    rot = cmath.exp(1j * theta)
    ring = FLOAT
    denom = TruncSeries.from_terms(ring, {0: 1 + 0j, 1: alpha.conjugate() * rot}, work)
    moebius = (
        TruncSeries.from_terms(ring, {0: alpha, 1: rot}, work) / denom
    )
    image = compose_polynomial(f_terms, moebius, work)
    shifted = image - TruncSeries.from_terms(ring, {0: shift}, work)
    return _loop_from_series(shifted, order, "f64")


def _time_is_zero(t) -> bool:
    if isinstance(t, (float, complex)):
        return t == 0
    if isinstance(t, GaussianRational):
        return t.is_zero()
    return t == 0


def _loop_from_series(f: TruncSeries, order: int, mode: str) -> InteriorSeriesLoop:
    const = f.coeff(0) if f.valuation <= 0 else None
    if const is not None and not f.ring.is_zero(const):
        if mode == "exact":
            raise DomainError("image map does not fix 0")
        if abs(complex(const)) > 1e-9:
            raise DomainError(f"image map does not fix 0 (f(0) = {const})")
    lam = f.coeff(1)
    if mode == "f64":
        lam_value = complex(lam).real
        us = [complex(f.coeff(n + 1)) / lam_value for n in range(1, min(order, f.order) )]
    else:
        lam_value = lam
        us = [f.coeff(n + 1) / lam for n in range(1, min(order, f.order))]
    while us and (abs(us[-1]) < 1e-300 if mode == "f64" else us[-1].is_zero()):
        us.pop()
    return InteriorSeriesLoop(lam_value, us, strict=False)


def _eval_series(s: TruncSeries, x: complex) -> complex:
    total = 0j
    for m, c in zip(s.known_exponents(), s.coeffs):
        total += complex(c) * x**m
    return total


def _eval_terms(terms: dict, x: complex) -> complex:
    return sum(complex(c) * x**m for m, c in terms.items())


# -- finite-difference oracle ---------------------------------------------------

FD_STEPS = (1e-4, 1e-5)


def finite_difference_generator(loop: LoopSpec, k: int, target: str) -> complex:
    """Numeric estimate of the complexified generator on one coordinate.

    Central differences at the two fixed steps with Richardson
    extrapolation, combined as (d_phi - i d_psi)/2 per the defining loop
    derivative. Tolerances in the oracle-agreement tests leave an order of
    magnitude of margin over the expected ~1e-8 truncation/roundoff floor.
    """
    if k < -1:
        raise DomainError("finite differences support k >= -1 only")
    fl = loop.to_float()
    idx = 0 if target in ("L", "Lambda") else int(target.lstrip("u"))
    order = max(8, idx + 4)

    def read(image: LoopSpec) -> complex:
        if idx == 0:
            return complex(image.lam())
        return complex(image.u_coeff(idx))

    def derivative(imaginary: bool) -> complex:
        estimates = []
        for h in FD_STEPS:
            plus = read(flow_image(fl, k, h, order=order, imaginary=imaginary))
            minus = read(flow_image(fl, k, -h, order=order, imaginary=imaginary))
            estimates.append((plus - minus) / (2 * h))
        ratio = (FD_STEPS[0] / FD_STEPS[1]) ** 2
        return (ratio * estimates[1] - estimates[0]) / (ratio - 1)

    return 0.5 * (derivative(False) - 1j * derivative(True))


def symbolic_generator_value(loop: LoopSpec, k: int, target: str) -> complex:
    """poly_eval of the symbolic generator image at the loop (float)."""
    idx = 0 if target in ("L", "Lambda") else int(target.lstrip("u"))
    n_coords = max(idx + max(0, -k) + 1, abs(k) + 1, 2)
    gen = witt_generator(k, n_coords)
    image = gen.image_lambda if idx == 0 else gen.image_u(idx)
    fl = loop.to_float()
    assignment = {"L": fl.lam(), "c": 0j}
    for n in range(1, n_coords + 1):
        assignment[f"u{n}"] = fl.u_coeff(n)
    return complex(image.evaluate(assignment))


# -- built-in panels ------------------------------------------------------------


def builtin_exact_loops() -> dict:
    """Named exact loops used by the verification suites."""
    quarter = GaussianRational(Fraction(1, 4))
    return {
        "circle_r2": CircleLoop(GaussianRational(0), 2),
        "circle_off": CircleLoop(GaussianRational(Fraction(1, 4), Fraction(1, 8)), 1),
        "pdisk_quarter": PerturbedDiskLoop(quarter, 2),
        "pdisk_complex": PerturbedDiskLoop(GaussianRational(Fraction(1, 8), Fraction(1, 8)), 3),
        "iseries_mixed": InteriorSeriesLoop(
            GaussianRational(Fraction(3, 2)),
            [
                GaussianRational(Fraction(1, 10), Fraction(1, 20)),
                GaussianRational(Fraction(-1, 8)),
                GaussianRational(Fraction(1, 50), Fraction(-1, 50)),
            ],
        ),
    }


def builtin_float_panel() -> List[LoopSpec]:
    """The fixed three-loop float panel for the oracle-agreement criterion."""
    return [
        PerturbedDiskLoop(0.25 + 0j, 2),
        InteriorSeriesLoop(1.0, [0.1 + 0.05j, -0.08 + 0.02j, 0.03 - 0.01j]),
        InteriorSeriesLoop(0.8, [-0.12 + 0.06j, 0.05 + 0.04j, -0.02j, 0.01 + 0j]),
    ]
