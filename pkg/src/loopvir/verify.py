"""Verification suites: identity grids packaged into deterministic reports."""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from .loops import PerturbedDiskLoop, builtin_exact_loops, pq_tau_check
from .neretin import neretin_table
from .poly import CoeffPoly, parse_target
from .scalar import GaussianRational
from .virasoro import (
    cocycle_check,
    lkp_identity_check,
    negative_pair_identity_check,
    virasoro_commutator_check,
)
from .witt import (
    commutator_residual,
    min_cutoff,
    required_cutoff,
    tau_flow_identity_check,
    witt_generator,
)

DEFAULT_WITT_TARGETS = ("L", "u1", "u2", "u3", "u4")
DEFAULT_VIRASORO_TARGETS = ("1", "L", "u1", "u2", "u1*u2")
PQ_RANDOM_COUNT = 10
PQ_RANDOM_SEED = 20240613


@dataclass
class VerificationReport:
    suite: str
    parameters: dict
    checks: List[dict] = field(default_factory=list)
    passed: bool = True
    duration_seconds: float = 0.0

    def finish(self) -> "VerificationReport":
        self.checks.sort(key=lambda r: (r["indices"], r.get("target") or ""))
        self.passed = all(r["pass"] for r in self.checks)
        return self

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "parameters": self.parameters,
            "checks": self.checks,
            "pass": self.passed,
            "duration_seconds": self.duration_seconds,
        }


def _run_grid(tasks: Sequence[Callable[[], List[dict]]], threads: int) -> List[dict]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda fn: fn(), tasks))
    else:
        chunks = [fn() for fn in tasks]
    return [rec for chunk in chunks for rec in chunk]


def _record(identity: str, indices, residual=None, target=None, passed=None, error=None) -> dict:
    rec = {
        "identity": identity,
        "indices": list(indices),
        "target": target,
        "residual": None if residual is None else str(residual),
        "error": error,
        "pass": bool(passed if passed is not None else residual.is_zero()),
    }
    return rec


def run_witt(range_: int, targets: Sequence[str] = DEFAULT_WITT_TARGETS,
             order: Optional[int] = None, threads: int = 1) -> VerificationReport:
    """[L_n, L_m] = (n-m) L_{n+m} exactly over the full index grid."""
    start = time.perf_counter()
    probe = [parse_target(t, 64) for t in targets]
    max_u = max((p.max_u_index() for p in probe), default=0)
    n_coords = order or required_cutoff((range_, range_), max_u, extra=(2 * range_,))
    if n_coords < required_cutoff((range_, range_), max_u, extra=(2 * range_,)):
        raise ValueError(
            f"--order {n_coords} is below the adaptive minimum "
            f"{required_cutoff((range_, range_), max_u, extra=(2 * range_,))}"
        )
    target_polys = [(t, parse_target(t, n_coords)) for t in targets]
    for k in range(-2 * range_, 2 * range_ + 1):
        if n_coords >= min_cutoff(k):
            witt_generator(k, n_coords)  # warm the cache before any pool use

    def task(n, m):
        def run():
            out = []
            for name, poly in target_polys:
                residual = commutator_residual(n, m, poly, n_coords=n_coords)
                out.append(_record("witt_commutator", (n, m), residual, target=name))
            return out
        return run

    tasks = [task(n, m) for n in range(-range_, range_ + 1) for m in range(-range_, range_ + 1)]
    report = VerificationReport(
        "witt",
        {"range": range_, "targets": list(targets), "n_coords": n_coords},
        _run_grid(tasks, threads),
    )
    report.duration_seconds = time.perf_counter() - start
    return report.finish()


def run_lkp(range_: int, order: Optional[int] = None, threads: int = 1) -> VerificationReport:
    """L_k P_m = (k+m) P_{m-k} + (k^3-k) delta_{k,m} for m >= k >= 0, else 0."""
    start = time.perf_counter()
    n_coords = order or (range_ + 1)
    table = neretin_table(range_, max(n_coords, range_ + 1))

    def task(k, m):
        def run():
            return [dict(lkp_identity_check(k, m, table), target=None, error=None)]
        return run

    tasks = [task(k, m) for k in range(0, range_ + 1) for m in range(0, range_ + 1)]
    report = VerificationReport(
        "lkp", {"range": range_, "n_coords": table.n_coords}, _run_grid(tasks, threads)
    )
    report.duration_seconds = time.perf_counter() - start
    return report.finish()


def run_negpair(range_: int, order: Optional[int] = None, threads: int = 1) -> VerificationReport:
    """L_{-k} P_n - L_{-n} P_k = (n-k) P_{k+n} for 1 <= k, n <= range."""
    start = time.perf_counter()
    k_max = 2 * range_
    n_coords = order or (3 * range_)
    table = neretin_table(k_max, max(n_coords, k_max + range_))
    for k in range(1, range_ + 1):
        witt_generator(-k, table.n_coords)

    def task(k, n):
        def run():
            return [dict(negative_pair_identity_check(k, n, table), target=None, error=None)]
        return run

    tasks = [task(k, n) for k in range(1, range_ + 1) for n in range(1, range_ + 1)]
    report = VerificationReport(
        "negpair", {"range": range_, "n_coords": table.n_coords}, _run_grid(tasks, threads)
    )
    report.duration_seconds = time.perf_counter() - start
    return report.finish()


def run_cocycle(range_: int, order: Optional[int] = None, threads: int = 1,
                corrupt: bool = False) -> VerificationReport:
    """The cocycle condition with symbolic central charge on |n|,|k| <= range."""
    start = time.perf_counter()
    n_coords = order or (2 * range_ + 1)
    table = neretin_table(2 * range_, max(n_coords, 2 * range_ + 1))
    for k in range(-range_, range_ + 1):
        if table.n_coords >= min_cutoff(k):
            witt_generator(k, table.n_coords)

    def task(n, k):
        def run():
            return [dict(cocycle_check(n, k, table, corrupt=corrupt), target=None, error=None)]
        return run

    tasks = [task(n, k) for n in range(-range_, range_ + 1) for k in range(-range_, range_ + 1)]
    report = VerificationReport(
        "cocycle",
        {"range": range_, "n_coords": table.n_coords, "corrupt_phi": corrupt},
        _run_grid(tasks, threads),
    )
    report.duration_seconds = time.perf_counter() - start
    return report.finish()


def run_virasoro(range_: int, targets: Sequence[str] = DEFAULT_VIRASORO_TARGETS,
                 order: Optional[int] = None, threads: int = 1,
                 corrupt: bool = False) -> VerificationReport:
    """The centrally extended operator relation on the stated target set."""
    start = time.perf_counter()
    probe = [parse_target(t, 64) for t in targets]
    max_u = max((p.max_u_index() for p in probe), default=0)
    n_coords = order or required_cutoff((range_, range_), max_u, extra=(2 * range_,))
    table = neretin_table(min(2 * range_, n_coords), n_coords)
    target_polys = [parse_target(t, n_coords) for t in targets]
    for k in range(-2 * range_, 2 * range_ + 1):
        if n_coords >= min_cutoff(k):
            witt_generator(k, n_coords)

    def task(n, k):
        def run():
            recs = virasoro_commutator_check(
                n, k, target_polys, n_coords=n_coords, table=table, corrupt=corrupt
            )
            for rec, name in zip(recs, targets):
                rec["target"] = name
                rec["error"] = None
            return recs
        return run

    tasks = [task(n, k) for n in range(-range_, range_ + 1) for k in range(-range_, range_ + 1)]
    report = VerificationReport(
        "virasoro",
        {"range": range_, "targets": list(targets), "n_coords": n_coords, "corrupt_phi": corrupt},
        _run_grid(tasks, threads),
    )
    report.duration_seconds = time.perf_counter() - start
    return report.finish()


def random_exact_loops(count: int = PQ_RANDOM_COUNT, seed: int = PQ_RANDOM_SEED) -> List[PerturbedDiskLoop]:
    """Seeded Gaussian-rational perturbed disks (valid, |eps| m < 1)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = rng.randint(2, 4)
        re = Fraction(rng.randint(-9, 9), rng.randint(24, 64))
        im = Fraction(rng.randint(-9, 9), rng.randint(24, 64))
        eps = GaussianRational(re, im)
        if eps.abs2() * m * m < 1 and not eps.is_zero():
            out.append(PerturbedDiskLoop(eps, m))
    return out


def run_tau(range_: int, order: int = 12, threads: int = 1,
            pq_order: int = 6) -> VerificationReport:
    """Flow conjugation identities in (t, z) plus the P/Q reflection checks."""
    start = time.perf_counter()

    def flow_task(k):
        def run():
            res = tau_flow_identity_check(k, order)
            return [
                _record("tau_flow_phi", (k,), target=None, passed=res["phi"]),
                _record("tau_flow_psi", (k,), target=None, passed=res["psi"]),
            ]
        return run

    def pq_task(name, loop):
        def run():
            res = pq_tau_check(loop, pq_order)
            return [_record("pq_tau", (pq_order,), target=name, passed=res["pass"])]
        return run

    tasks = [flow_task(k) for k in range(-range_, range_ + 1)]
    for name, loop in sorted(builtin_exact_loops().items()):
        tasks.append(pq_task(name, loop))
    for i, loop in enumerate(random_exact_loops()):
        tasks.append(pq_task(f"random_{i:02d}", loop))
    report = VerificationReport(
        "tau",
        {"range": range_, "order": order, "pq_order": pq_order,
         "random_loops": PQ_RANDOM_COUNT, "seed": PQ_RANDOM_SEED},
        _run_grid(tasks, threads),
    )
    report.duration_seconds = time.perf_counter() - start
    return report.finish()


SUITES = ("witt", "lkp", "negpair", "cocycle", "virasoro", "tau")


def run_suite(name: str, range_: int, order: Optional[int] = None, threads: int = 1,
              targets: Optional[Sequence[str]] = None, corrupt: bool = False) -> VerificationReport:
    if name == "witt":
        return run_witt(range_, targets or DEFAULT_WITT_TARGETS, order, threads)
    if name == "lkp":
        return run_lkp(range_, order, threads)
    if name == "negpair":
        return run_negpair(range_, order, threads)
    if name == "cocycle":
        return run_cocycle(range_, order, threads, corrupt=corrupt)
    if name == "virasoro":
        return run_virasoro(range_, targets or DEFAULT_VIRASORO_TARGETS, order, threads,
                            corrupt=corrupt)
    if name == "tau":
        return run_tau(range_, order or 12, threads)
    raise ValueError(f"unknown suite {name!r}")


def run_all(range_: int, threads: int = 1, corrupt: bool = False) -> List[VerificationReport]:
    """The whole battery; grid sizes derive from the range so the default
    range reproduces the documented acceptance grids (lkp runs deeper, the
    operator grid one step lower)."""
    return [
        run_witt(range_, threads=threads),
        run_lkp(range_ + 3, threads=threads),
        run_negpair(range_, threads=threads),
        run_cocycle(range_, threads=threads, corrupt=corrupt),
        run_virasoro(max(1, range_ - 1), threads=threads, corrupt=corrupt),
        run_tau(range_, threads=threads),
    ]
