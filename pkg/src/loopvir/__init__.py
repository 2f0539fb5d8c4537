"""Exact symbolic engine for the Virasoro structure on loop coordinates."""

from .errors import (
    CutoffMismatchError,
    DomainError,
    LoopVirError,
    NotInvertibleError,
    TruncationError,
)
from .neretin import NeretinTable, neretin_q_from_exterior, neretin_table, pair_contour, symbolic_f
from .poly import CoeffPoly, CoeffPolyRing, Grading, apply_derivation
from .scalar import GaussianRational, Rational, central_charge
from .series import (
    SeriesAtInfinity,
    TruncSeries,
    compose,
    compose_polynomial,
    rational_power,
    revert,
    schwarzian,
    schwarzian_chain_check,
    series_equal,
)
from .virasoro import (
    VirasoroOperator,
    cocycle_check,
    lkp_identity_check,
    negative_pair_identity_check,
    phi,
    virasoro_commutator_check,
)
from .witt import (
    WittDerivation,
    commutator_residual,
    flow_series,
    tau_flow_identity_check,
    witt_commutator_check,
    witt_generator,
)
from .loops import (
    CircleLoop,
    ExteriorSeriesLoop,
    InteriorSeriesLoop,
    LoopSpec,
    PerturbedDiskLoop,
    bieberbach_check,
    eval_p,
    finite_difference_generator,
    flow_image,
    pq_tau_check,
    tau_transform,
)

__version__ = "0.1.0"
