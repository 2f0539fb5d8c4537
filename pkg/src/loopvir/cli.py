"""Command-line front end: tables, identity grids, numeric evaluation.

Configuration precedence is flags > LOOPVIR_* environment variables >
key=value config file (--config PATH); the shared keys are order, range,
scalar_mode, threads. Exit codes: 0 all checks pass, 1 any check fails,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from .errors import DomainError, LoopVirError, TruncationError
from .loops import (
    CircleLoop,
    InteriorSeriesLoop,
    LoopSpec,
    PerturbedDiskLoop,
    eval_p,
    finite_difference_generator,
    pq_tau_check,
    symbolic_generator_value,
)
from .neretin import neretin_table
from .scalar import GaussianRational, format_gaussian, parse_gaussian
from .verify import SUITES, run_all, run_suite
from .witt import flow_data_at_infinity, flow_series, min_cutoff, witt_generator

CONFIG_KEYS = ("order", "range", "scalar_mode", "threads")
ENV_PREFIX = "LOOPVIR_"


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"malformed config line: {line!r}")
                key, _, raw = line.partition("=")
                values[key.strip()] = raw.strip().strip('"')
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    return values


def resolve_settings(args: argparse.Namespace) -> dict:
    """flags > environment > config file, for the shared keys."""
    settings = {"order": None, "range": None, "scalar_mode": "exact", "threads": 1}
    if getattr(args, "config", None):
        cfg = _read_config_file(args.config)
        for key in CONFIG_KEYS:
            if key in cfg:
                settings[key] = cfg[key]
    for key in CONFIG_KEYS:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            settings[key] = env
    if getattr(args, "order", None) is not None:
        settings["order"] = args.order
    if getattr(args, "range", None) is not None:
        settings["range"] = args.range
    if getattr(args, "scalar", None):
        settings["scalar_mode"] = args.scalar
    if getattr(args, "threads", None) is not None:
        settings["threads"] = args.threads
    for key in ("order", "range", "threads"):
        if isinstance(settings[key], str):
            settings[key] = int(settings[key])
    if settings["threads"] is None or settings["threads"] < 1:
        settings["threads"] = os.cpu_count() or 1
    if settings["scalar_mode"] not in ("exact", "f64"):
        raise ValueError(f"scalar_mode must be exact or f64, got {settings['scalar_mode']}")
    return settings


def _parse_scalar(text: str, mode: str):
    text = text.strip()
    try:
        value = parse_gaussian(text)
    except ValueError:
        try:
            value = complex(text.replace("i", "j"))
        except ValueError as exc:
            raise ValueError(f"cannot parse scalar {text!r}") from exc
        if mode == "exact":
            raise ValueError(f"{text!r} is not exact; use p/q(+r/s*i) or --scalar f64")
        return value
    return complex(value) if mode == "f64" else value


def parse_loop(spec: str, mode: str) -> LoopSpec:
    """Grammar: circle:a,r | pdisk:eps,m | iseries:Lambda;u1,u2,..."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    if not rest:
        raise ValueError(f"malformed loop spec {spec!r}")
    if kind == "circle":
        a_s, _, r_s = rest.rpartition(",")
        if not a_s:
            raise ValueError("circle spec needs center,radius")
        return CircleLoop(_parse_scalar(a_s, mode), _parse_real(r_s, mode, "radius"))
    if kind == "pdisk":
        eps_s, _, m_s = rest.rpartition(",")
        if not eps_s:
            raise ValueError("pdisk spec needs eps,m")
        return PerturbedDiskLoop(_parse_scalar(eps_s, mode), int(m_s))
    if kind == "iseries":
        lam_s, _, u_s = rest.partition(";")
        us = [_parse_scalar(u, mode) for u in u_s.split(",") if u.strip()] if u_s else []
        return InteriorSeriesLoop(_parse_real(lam_s, mode, "Lambda"), us)
    raise ValueError(f"unknown loop kind {kind!r} (circle | pdisk | iseries)")


def _parse_real(text: str, mode: str, what: str):
    value = _parse_scalar(text, mode)
    if isinstance(value, GaussianRational):
        if not value.is_real():
            raise ValueError(f"{what} must be real, got {text!r}")
        return value.re
    if value.imag:
        raise ValueError(f"{what} must be real, got {text!r}")
    return value.real


def _fmt_value(v) -> str:
    if isinstance(v, GaussianRational):
        return format_gaussian(v)
    z = complex(v)
    if z.imag == 0:
        return f"{z.real:.15g}"
    return f"{z.real:.15g}{z.imag:+.15g}i"


def _emit(payload, as_json: bool, text_lines):
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


# -- subcommands ----------------------------------------------------------------


def cmd_neretin(args) -> int:
    settings = resolve_settings(args)
    k_max = args.table_order if args.table_order is not None else settings["order"]
    if k_max is None:
        k_max = 8
    if k_max < 0:
        raise UsageError("--order must be >= 0")
    table = neretin_table(k_max)
    payload = {
        "K": table.cutoff,
        "N": table.n_coords,
        "entries": [{"k": k, "poly": str(table[k])} for k in range(k_max + 1)],
    }
    _emit(payload, args.json, [f"P_{e['k']} = {e['poly']}" for e in payload["entries"]])
    return 0


def cmd_witt(args) -> int:
    settings = resolve_settings(args)
    k = args.k
    n_coords = settings["order"] or max(min_cutoff(k), abs(k) + 4)
    gen = witt_generator(k, n_coords)
    payload = {
        "k": k,
        "n_coords": n_coords,
        "n_valid": gen.n_valid,
        "L": str(gen.image_lambda),
        "u": [{"n": n, "image": str(gen.image_u(n))} for n in range(1, gen.n_valid + 1)],
    }
    lines = [f"L_{k}(L) = {payload['L']}"] + [
        f"L_{k}(u{row['n']}) = {row['image']}" for row in payload["u"]
    ]
    _emit(payload, args.json, lines)
    return 0


def cmd_flows(args) -> int:
    settings = resolve_settings(args)
    order = settings["order"] or 8
    k = args.k
    mode = settings["scalar_mode"]
    t = _parse_scalar(args.t, mode)
    payload = {"k": k, "t": args.t, "order": order}
    if k == 0:
        if mode == "exact":
            payload["phi"] = "e^{-t}*z (scale kept symbolic in exact mode)"
            payload["psi"] = "e^{-i*t}*z (scale kept symbolic in exact mode)"
        else:
            import cmath

            payload["phi"] = f"({_fmt_value(cmath.exp(-t))})*z"
            payload["psi"] = f"({_fmt_value(cmath.exp(-1j * t))})*z"
    elif k >= 1:
        payload["phi"] = str(flow_series(k, t, order))
        payload["psi"] = str(flow_series(k, t, order, imaginary=True))
    else:
        payload["phi"] = "1/(" + str(flow_data_at_infinity(k, t, order)) + ") at w=inf"
        payload["psi"] = "1/(" + str(flow_data_at_infinity(k, t, order, imaginary=True)) + ") at w=inf"
    _emit(payload, args.json, [f"phi_{{{k},t}}: {payload['phi']}", f"psi_{{{k},t}}: {payload['psi']}"])
    return 0


def cmd_verify(args) -> int:
    settings = resolve_settings(args)
    range_ = settings["range"] or 5
    if range_ < 1:
        raise UsageError("--range must be >= 1")
    threads = settings["threads"]
    targets = args.targets.split(",") if args.targets else None
    start = time.perf_counter()
    if args.suite == "all":
        reports = run_all(range_, threads=threads, corrupt=args.corrupt_phi)
        passed = all(r.passed for r in reports)
        payload = {
            "suites": [r.to_json() for r in reports],
            "pass": passed,
            "duration_seconds": time.perf_counter() - start,
        }
        lines = []
        for r in reports:
            lines.append(
                f"[{'PASS' if r.passed else 'FAIL'}] {r.suite}: "
                f"{sum(1 for c in r.checks if c['pass'])}/{len(r.checks)} checks "
                f"({r.duration_seconds:.2f}s)"
            )
        lines.append(f"overall: {'PASS' if passed else 'FAIL'}")
    else:
        report = run_suite(
            args.suite, range_, order=settings["order"], threads=threads,
            targets=targets, corrupt=args.corrupt_phi,
        )
        passed = report.passed
        payload = report.to_json()
        lines = []
        for c in report.checks:
            if not c["pass"]:
                detail = c["residual"] if c["residual"] not in (None, "0") else ""
                lines.append(
                    f"FAIL {c['identity']} {tuple(c['indices'])}"
                    + (f" target={c['target']}" if c["target"] else "")
                    + (f" residual={detail}" if detail else "")
                )
        lines.append(
            f"[{'PASS' if passed else 'FAIL'}] {report.suite}: "
            f"{sum(1 for c in report.checks if c['pass'])}/{len(report.checks)} checks "
            f"({report.duration_seconds:.2f}s)"
        )
    _emit(payload, args.json, lines)
    return 0 if passed else 1


def cmd_eval(args) -> int:
    settings = resolve_settings(args)
    mode = settings["scalar_mode"]
    loop = parse_loop(args.loop, mode)
    if args.p_order is not None:
        values = eval_p(loop, args.p_order)
        payload = {
            "loop": loop.describe(),
            "P": [{"k": k, "value": _fmt_value(v)} for k, v in enumerate(values)],
        }
        _emit(payload, args.json, [f"P_{r['k']} = {r['value']}" for r in payload["P"]])
        return 0
    if args.tau_check is not None:
        result = pq_tau_check(loop, args.tau_check)
        payload = {
            "loop": result["loop"],
            "K": result["K"],
            "rows": [
                {"k": r["k"], "pass": r["pass"], "error": r["error"]} for r in result["rows"]
            ],
            "pass": result["pass"],
        }
        lines = [
            f"k={r['k']}: {'ok' if r['pass'] else 'MISMATCH'}"
            + (f" (|err|={r['error']:.3e})" if r["error"] is not None else "")
            for r in result["rows"]
        ] + [f"tau-check: {'PASS' if result['pass'] else 'FAIL'}"]
        _emit(payload, args.json, lines)
        return 0 if result["pass"] else 1
    if args.fd:
        k = int(args.fd[0])
        target = args.fd[1]
        estimate = finite_difference_generator(loop, k, target)
        symbolic = symbolic_generator_value(loop, k, target)
        err = abs(estimate - symbolic) / max(1e-12, abs(symbolic))
        payload = {
            "loop": loop.describe(),
            "k": k,
            "target": target,
            "estimate": _fmt_value(estimate),
            "symbolic": _fmt_value(symbolic),
            "relative_error": err,
        }
        _emit(
            payload,
            args.json,
            [
                f"finite-difference L_{k}({target}) = {payload['estimate']}",
                f"symbolic             = {payload['symbolic']}",
                f"relative error       = {err:.3e}",
            ],
        )
        return 0
    raise UsageError("eval needs one of --P, --tau-check, --fd")


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--json", action="store_true", help="machine-readable output")
    shared.add_argument("--order", type=int, default=None,
                        help="truncation/table order override (default adaptive)")
    shared.add_argument("--range", type=int, default=None, help="index range for grids")
    shared.add_argument("--scalar", choices=("exact", "f64"), default=None,
                        help="scalar mode for loop data (default exact)")
    shared.add_argument("--threads", type=int, default=None,
                        help="grid parallelism (default 1; 0 = all cores)")
    shared.add_argument("--config", default=None, help="key=value config file")

    parser = argparse.ArgumentParser(
        prog="loopvir",
        description="Exact verification of the Virasoro structure on loop coordinates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ner = sub.add_parser("neretin", parents=[shared], help="print the polynomial table")
    p_ner.add_argument("--table-order", dest="table_order", type=int, default=None,
                       help="alias for --order (table cutoff K)")
    p_ner.set_defaults(func=cmd_neretin)

    p_witt = sub.add_parser("witt", parents=[shared], help="print generator images")
    p_witt.add_argument("--k", type=int, required=True, help="generator index")
    p_witt.set_defaults(func=cmd_witt)

    p_flows = sub.add_parser("flows", parents=[shared], help="print flow expansions")
    p_flows.add_argument("--k", type=int, required=True)
    p_flows.add_argument("--t", required=True, help="time (rational, or float with --scalar f64)")
    p_flows.set_defaults(func=cmd_flows)

    p_ver = sub.add_parser(
        "verify", parents=[shared],
        help="run identity grids; 'all --range 5' reproduces the full battery "
             "(witt/cocycle/negpair/tau at R, lkp at R+3, operators at R-1)",
    )
    p_ver.add_argument("suite", choices=SUITES + ("all",))
    p_ver.add_argument("--targets", default=None, help="comma-separated target monomials")
    p_ver.add_argument("--corrupt-phi", action="store_true",
                       help="negative control: offset one cocycle multiplier")
    p_ver.set_defaults(func=cmd_verify)

    p_eval = sub.add_parser("eval", parents=[shared], help="numeric loop evaluation")
    p_eval.add_argument("--loop", required=True,
                        help="circle:a,r | pdisk:eps,m | iseries:Lambda;u1,u2,...")
    p_eval.add_argument("--P", dest="p_order", type=int, default=None,
                        help="evaluate P_0..P_K at the loop")
    p_eval.add_argument("--tau-check", dest="tau_check", type=int, default=None,
                        help="check Q_k(tau(loop)) = conj(P_k(loop)) for k <= K")
    p_eval.add_argument("--fd", nargs=2, metavar=("K", "TARGET"), default=None,
                        help="finite-difference generator estimate vs symbolic")
    p_eval.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"error: {exc}\n")
    except (DomainError, TruncationError, ValueError) as exc:
        parser.exit(2, f"error: {exc}\n")
    except LoopVirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
