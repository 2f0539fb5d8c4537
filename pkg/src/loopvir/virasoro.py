"""Cocycle multipliers and the centrally extended generators.

The operator with index k acts on coordinate polynomials as
L_k + multiplication by Phi_k, where Phi_k vanishes for k > 0 and equals
(c/12) P_{-k} for k <= 0 with c the formal central-charge symbol. All
checks here are exact polynomial identities with c symbolic; numbers for
specific kappa enter only through scalar.central_charge in reporting.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from .errors import DomainError, TruncationError
from .neretin import NeretinTable, neretin_table
from .poly import CoeffPoly
from .scalar import GaussianRational
from .witt import WittDerivation, min_cutoff, required_cutoff, witt_generator

_TWELFTH = GaussianRational(1) / GaussianRational(12)


def phi(k: int, table: NeretinTable) -> CoeffPoly:
    """The cocycle multiplier: 0 for k > 0, (c/12) P_{-k} for k <= 0."""
    if k > 0:
        return CoeffPoly.zero(table.n_coords)
    if -k > table.cutoff:
        raise DomainError(f"phi({k}) needs table cutoff >= {-k}, got {table.cutoff}")
    c = CoeffPoly.c(table.n_coords)
    return c * table[-k].scale(_TWELFTH)


class VirasoroOperator:
    """L_k^C plus multiplication by Phi_k, acting on coordinate polynomials."""

    __slots__ = ("k", "derivation", "multiplier")

    def __init__(self, k: int, derivation: WittDerivation, multiplier: CoeffPoly):
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "derivation", derivation)
        object.__setattr__(self, "multiplier", multiplier)

    def __setattr__(self, name, value):
        raise AttributeError("VirasoroOperator is immutable")

    @staticmethod
    def build(k: int, n_coords: int, table: Optional[NeretinTable] = None) -> "VirasoroOperator":
        if table is None:
            table = neretin_table(max(-k, 0), n_coords)
        if table.n_coords != n_coords:
            raise DomainError(
                f"table ring N={table.n_coords} differs from operator N={n_coords}"
            )
        return VirasoroOperator(k, witt_generator(k, n_coords), phi(k, table))

    def apply(self, p: CoeffPoly) -> CoeffPoly:
        return self.derivation.apply(p) + self.multiplier * p

    def __repr__(self):
        return f"VirasoroOperator(k={self.k}, N={self.derivation.cutoff})"


def _as_record(identity: str, indices: Sequence[int], residual: CoeffPoly, target: str = None) -> dict:
    rec = {
        "identity": identity,
        "indices": list(indices),
        "residual": str(residual),
        "pass": residual.is_zero(),
    }
    if target is not None:
        rec["target"] = target
    return rec


def lkp_identity_check(k: int, m: int, table: NeretinTable) -> dict:
    """L_k P_m - ((k+m) P_{m-k} + (k^3-k) delta_{k,m}) for m >= k >= 0,
    and plain L_k P_m for k > m >= 0 (expected zero)."""
    if k < 0 or m < 0:
        raise DomainError("lkp identity is indexed by k, m >= 0")
    if m > table.cutoff:
        raise TruncationError(f"P_{m} beyond table cutoff {table.cutoff}")
    n_coords = table.n_coords
    gen = witt_generator(k, n_coords)
    lhs = gen.apply(table[m])
    if k <= m:
        rhs = table[m - k].scale(GaussianRational(k + m))
        if k == m:
            rhs = rhs + CoeffPoly.constant(n_coords, k**3 - k)
    else:
        rhs = CoeffPoly.zero(n_coords)
    return _as_record("lkp", (k, m), lhs - rhs)


def negative_pair_identity_check(k: int, n: int, table: NeretinTable) -> dict:
    """L_{-k} P_n - L_{-n} P_k - (n-k) P_{k+n}, expected exactly zero.

    Proved in the source material through a measure-theoretic divergence
    argument; here it is confirmed as a pure polynomial identity.
    """
    if k < 1 or n < 1:
        raise DomainError("negative-pair identity is indexed by k, n >= 1")
    if k + n > table.cutoff:
        raise TruncationError(
            f"P_{k + n} beyond table cutoff {table.cutoff}; rebuild with K >= {k + n}"
        )
    n_coords = table.n_coords
    lhs = witt_generator(-k, n_coords).apply(table[n]) - witt_generator(-n, n_coords).apply(table[k])
    rhs = table[k + n].scale(GaussianRational(n - k))
    return _as_record("negpair", (k, n), lhs - rhs)


def cocycle_check(n: int, k: int, table: Optional[NeretinTable] = None,
                  corrupt: bool = False) -> dict:
    """L_n Phi_k - L_k Phi_n - (n-k) Phi_{n+k} - (c/12)(n^3-n) delta_{n,-k}.

    With corrupt=True the Phi_{-2} multiplier is deliberately offset by 1,
    a negative control that must produce a nonzero residual.
    """
    if table is None:
        n_coords = max(abs(n) + abs(k) + 1, min_cutoff(n), min_cutoff(k))
        table = neretin_table(abs(n) + abs(k), n_coords)
    n_coords = table.n_coords
    phi_n = _phi_maybe_corrupt(n, table, corrupt)
    phi_k = _phi_maybe_corrupt(k, table, corrupt)
    phi_nk = _phi_maybe_corrupt(n + k, table, corrupt)
    lhs = witt_generator(n, n_coords).apply(phi_k) - witt_generator(k, n_coords).apply(phi_n)
    rhs = phi_nk.scale(GaussianRational(n - k))
    if n == -k:
        central = CoeffPoly.c(n_coords).scale(GaussianRational(n**3 - n) * _TWELFTH)
        rhs = rhs + central
    return _as_record("cocycle", (n, k), lhs - rhs)


def _phi_maybe_corrupt(k: int, table: NeretinTable, corrupt: bool) -> CoeffPoly:
    value = phi(k, table)
    if corrupt and k == -2:
        value = value + CoeffPoly.constant(table.n_coords, 1)
    return value


def virasoro_commutator_check(
    n: int, k: int, targets: Sequence[CoeffPoly], n_coords: Optional[int] = None,
    table: Optional[NeretinTable] = None, corrupt: bool = False
) -> List[dict]:
    """[L_n + Phi_n, L_k + Phi_k] F - (n-k)(L_{n+k} + Phi_{n+k}) F
    - (c/12)(n^3-n) delta_{n,-k} F on each target, expected exactly zero."""
    max_u = max((t.max_u_index() for t in targets), default=0)
    if n_coords is None:
        n_coords = required_cutoff((n, k), max_u, extra=(n + k,))
    if table is None:
        table = neretin_table(max(0, -n, -k, -(n + k)), n_coords)
    op_n = VirasoroOperator(n, witt_generator(n, n_coords), _phi_maybe_corrupt(n, table, corrupt))
    op_k = VirasoroOperator(k, witt_generator(k, n_coords), _phi_maybe_corrupt(k, table, corrupt))
    op_nk = VirasoroOperator(
        n + k, witt_generator(n + k, n_coords), _phi_maybe_corrupt(n + k, table, corrupt)
    )
    central_scale = GaussianRational(n**3 - n) * _TWELFTH if n == -k else None
    c_poly = CoeffPoly.c(n_coords)
    records = []
    for target in targets:
        tgt = target.with_cutoff(n_coords) if target.cutoff != n_coords else target
        lhs = op_n.apply(op_k.apply(tgt)) - op_k.apply(op_n.apply(tgt))
        rhs = op_nk.apply(tgt).scale(GaussianRational(n - k))
        if central_scale is not None:
            rhs = rhs + c_poly.scale(central_scale) * tgt
        records.append(_as_record("virasoro", (n, k), lhs - rhs, target=str(target)))
    return records
