"""Neretin polynomial tables from the symbolic normalized map.

The normalized interior map is f(z) = L*z*(1 + u_1 z + ... + u_N z^N) with
L the conformal radius variable. The table entry P_k is the coefficient of
z^k in z^2 * S[f^{-1}](z), an exact polynomial in L^{-1} and the u's; the
exterior companions Q_k are read off the expansion of z^2 * S[g^{-1}] at
infinity. P_0 = P_1 = 0 always, and P_k is bi-homogeneous of Lambda-degree
-k and u-weight k.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Union

from .errors import DomainError, TruncationError
from .poly import CoeffPoly, CoeffPolyRing, Grading
from .scalar import GaussianRational
from .series import SeriesAtInfinity, TruncSeries, revert, schwarzian


def symbolic_f(n_coords: int, ring: CoeffPolyRing = None) -> TruncSeries:
    """The universal normalized map L*z*(1 + sum u_n z^n), exact to order N+1."""
    if n_coords < 1:
        raise DomainError(f"symbolic_f requires N >= 1, got {n_coords}")
    if ring is None:
        ring = CoeffPolyRing(n_coords)
    if ring.cutoff < n_coords:
        raise DomainError(
            f"coefficient ring cutoff {ring.cutoff} below requested N={n_coords}"
        )
    lam = CoeffPoly.lam(ring.cutoff)
    terms = {1: lam}
    for n in range(1, n_coords + 1):
        terms[n + 1] = lam * CoeffPoly.u(ring.cutoff, n)
    return TruncSeries.from_terms(ring, terms, n_coords + 1)


class NeretinTable:
    """Entries P_0..P_K over the coordinate ring with cutoff N >= K."""

    __slots__ = ("cutoff", "n_coords", "entries")

    def __init__(self, cutoff: int, n_coords: int, entries: Sequence[CoeffPoly]):
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "n_coords", n_coords)
        object.__setattr__(self, "entries", tuple(entries))

    def __setattr__(self, name, value):
        raise AttributeError("NeretinTable is immutable")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k: int) -> CoeffPoly:
        if not 0 <= k <= self.cutoff:
            raise IndexError(f"P_{k} out of table range 0..{self.cutoff}")
        return self.entries[k]

    def gradings_ok(self) -> bool:
        """Every nonzero entry is bi-homogeneous with grading (-k, k)."""
        for k, p in enumerate(self.entries):
            if p.is_zero():
                continue
            if p.grading() != Grading(-k, k):
                return False
        return True


@lru_cache(maxsize=None)
def _neretin_table_cached(k_max: int, n_coords: int) -> NeretinTable:
    ring = CoeffPolyRing(n_coords)
    f = symbolic_f(n_coords, ring)
    f_inv = revert(f)
    s = schwarzian(f_inv)
    if s.order < k_max - 2:
        raise TruncationError(
            f"schwarzian only exact to order {s.order}, need {k_max - 2}"
        )
    entries = []
    for k in range(k_max + 1):
        entries.append(s.coeff(k - 2) if k - 2 <= s.order else ring.zero)
    assert entries[0].is_zero() and (k_max < 1 or entries[1].is_zero())
    return NeretinTable(k_max, n_coords, entries)


def neretin_table(k_max: int, n_coords: int = None) -> NeretinTable:
    """Table of P_0..P_K; N defaults to K and may be enlarged for ring compatibility."""
    if k_max < 0:
        raise DomainError(f"table cutoff must be >= 0, got {k_max}")
    if n_coords is None:
        n_coords = max(k_max, 1)
    if n_coords < k_max:
        raise DomainError(f"coordinate cutoff N={n_coords} below table cutoff K={k_max}")
    return _neretin_table_cached(k_max, n_coords)


def neretin_q_from_exterior(
    g_inverse_at_infinity: SeriesAtInfinity, k_max: int
) -> List:
    """Q_0..Q_K from the expansion of g^{-1} at infinity.

    With G(s) = g^{-1}(1/s) (a power series of valuation 1), the Moebius
    substitution w = 1/s turns z^2 S[g^{-1}](z) = sum Q_k z^{-k} into
    s^2 S[G](s) = sum Q_k s^k, so the Q's are plain power-series
    coefficients of the same Schwarzian pipeline used for P.
    """
    g = g_inverse_at_infinity.tail
    if g.valuation != 1:
        raise DomainError(
            "exterior data must expand g^{-1}(w) = b_1/w + ... with b_1 != 0"
        )
    s = schwarzian(g)
    if s.order < k_max - 2:
        raise TruncationError(
            f"exterior expansion supports Q_k only to k={s.order + 2}, need {k_max}"
        )
    ring = g.ring
    return [s.coeff(k - 2) if k >= 2 else ring.zero for k in range(k_max + 1)]


def pair_contour(n: int, side: str, entries) -> tuple:
    """Residue pairing of the vector field -z^{n+1} against the stored series.

    Returns the coefficient pair (phi-flow combination, psi-flow
    combination): interior pairing at index n <= 0 gives (-P_{-n}/3,
    +P_{-n}/3); exterior pairing at n >= 0 gives (+Q_n/3, -Q_n/3). The
    real part of the first (resp. imaginary part of the second) entry is
    the derivative of the renormalized loop mass along the flow.
    """
    third = Fraction(1, 3)
    if side == "interior":
        if n > 0:
            raise DomainError("interior pairing requires n <= 0")
        k = -n
        if k >= len(entries):
            raise IndexError(f"P_{k} beyond table cutoff {len(entries) - 1}")
        p = entries[k]
        return (-_scale_entry(p, third), _scale_entry(p, third))
    if side == "exterior":
        if n < 0:
            raise DomainError("exterior pairing requires n >= 0")
        if n >= len(entries):
            raise IndexError(f"Q_{n} beyond list cutoff {len(entries) - 1}")
        q = entries[n]
        return (_scale_entry(q, third), -_scale_entry(q, third))
    raise ValueError(f"side must be 'interior' or 'exterior', got {side!r}")


def _scale_entry(entry, ratio: Fraction):
    if isinstance(entry, CoeffPoly):
        return entry.scale(GaussianRational(ratio))
    if isinstance(entry, GaussianRational):
        return entry * GaussianRational(ratio)
    return entry * float(ratio)
