"""Command line front end.

Exit status: 0 when the requested property is verified, 1 when the check
ran and failed (not a frame, not woven, ...), 2 for bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .errors import (
    EmptyIntersectionError,
    InvertibilityError,
    NotAFrameError,
    WovenError,
)
from .fileio import file_digest, load_bank, load_operator, load_subspace, save_bank
from .frames import Bounds, frame_operator, optimal_bounds
from .linalg import RANK_RTOL, sym_eigen
from .weaving import (
    Partition,
    concatenated_family,
    enumeration_cap,
    partition_count,
    project_bank,
    standard_dual_woven,
    subspace_intersection,
    sum_operator,
    sum_woven_check,
    synthesis_norm_bound,
    tighten_woven,
    transform_woven,
    universal_bounds_exhaustive,
    universal_bounds_sampled,
    weave,
    woven_frame_operator,
)

DEFAULT_SAMPLES = 10000
CONTAINMENT_RTOL = 1e-12
RECONSTRUCTION_RTOL = 1e-8
PARSEVAL_TOL = 1e-8
MATCH_RTOL = 1e-9
TIMING_KEY = "wall_clock_s"


def _bounds(b: Bounds) -> dict:
    return {
        "lower": b.lower,
        "upper": b.upper,
        "is_frame": b.is_frame,
        "is_tight": b.is_tight,
        "is_parseval": b.is_parseval,
    }


def _certificate(cert) -> dict:
    out = {
        "mode": cert.mode,
        "partitions_checked": cert.partitions_checked,
        "universal_lower": cert.universal_lower,
        "universal_upper": cert.universal_upper,
        "witness_lower": str(cert.witness_lower),
        "witness_upper": str(cert.witness_upper),
        "is_woven": cert.is_woven,
    }
    if cert.table is not None:
        out["partitions"] = [
            {"index": k, "lower": lo, "upper": hi} for k, (lo, hi) in enumerate(cert.table)
        ]
    return out


def _contains(outer: Bounds, inner: Bounds) -> bool:
    return outer.contains(inner, CONTAINMENT_RTOL)


def _bank_vectors(bank) -> dict:
    return {name: bank.vectors[j].tolist() for j, name in enumerate(bank.names)}


def _woven_certificate(bank, args, warnings):
    cap = enumeration_cap()
    if args.samples is None:
        total = partition_count(bank.n, bank.m)
        if total <= cap:
            return universal_bounds_exhaustive(bank, cap, keep_table=getattr(args, "table", False))
        warnings.append(
            f"{total} partitions exceed the enumeration cap {cap}; "
            f"switched to {DEFAULT_SAMPLES} sampled partitions (seed {args.seed})"
        )
        return universal_bounds_sampled(bank, DEFAULT_SAMPLES, args.seed)
    return universal_bounds_sampled(bank, args.samples, args.seed)


# -- subcommands; each returns (result dict, verified flag) ---------------------


def cmd_bounds(args, inputs, warnings):
    bank = load_bank(args.bank)
    inputs["bank"] = args.bank
    names = [args.frame] if args.frame else list(bank.names)
    result = {}
    for name in names:
        if name not in bank.names:
            raise WovenError(f"no frame named {name!r}; bank has {list(bank.names)}")
        result[name] = _bounds(optimal_bounds(bank.frame(name)))
    return {"frames": result}, all(r["is_frame"] for r in result.values())


def cmd_weave(args, inputs, warnings):
    bank = load_bank(args.bank)
    inputs["bank"] = args.bank
    p = Partition.parse(args.partition)
    w = weave(bank, p)
    b = optimal_bounds(w)
    return {"partition": str(p), "vectors": w.vectors.tolist(), "bounds": _bounds(b)}, b.is_frame


def cmd_verify_woven(args, inputs, warnings):
    bank = load_bank(args.bank)
    inputs["bank"] = args.bank
    cert = _woven_certificate(bank, args, warnings)
    s_f = sym_eigen(woven_frame_operator(bank))
    sq_norm, sum_upper = synthesis_norm_bound(bank)
    result = {
        "n": bank.n,
        "m": bank.m,
        "dim": bank.dim,
        "certificate": _certificate(cert),
        "woven_frame_operator": {
            "lambda_min": s_f.lambda_min,
            "lambda_max": s_f.lambda_max,
            "sum_of_frame_upper_bounds": sum_upper,
            "lower_dominates_C": bool(s_f.lambda_min >= cert.universal_lower * (1 - CONTAINMENT_RTOL)),
            "synthesis_norm_sq_within_sum": bool(sq_norm <= sum_upper * (1 + CONTAINMENT_RTOL)),
        },
    }
    return result, cert.is_woven


def cmd_dual(args, inputs, warnings):
    bank = load_bank(args.bank)
    inputs["bank"] = args.bank
    try:
        dual = standard_dual_woven(bank)
    except NotAFrameError as exc:
        return {"error": str(exc), "lambda_min": exc.lambda_min}, False
    # f = sum <f, S^-1 f_ij> f_ij reproduces the identity: U_F^T U_dual = I
    u = concatenated_family(bank).vectors
    ud = concatenated_family(dual).vectors
    residual = float(np.abs(u.T @ ud - np.eye(bank.dim)).max())
    if args.output:
        save_bank(dual, args.output, title="standard dual woven")
    ok = residual <= RECONSTRUCTION_RTOL
    return {"dual": _bank_vectors(dual), "reconstruction_residual": residual}, ok


def cmd_tighten(args, inputs, warnings):
    bank = load_bank(args.bank)
    inputs["bank"] = args.bank
    try:
        tight = tighten_woven(bank)
    except NotAFrameError as exc:
        return {"error": str(exc), "lambda_min": exc.lambda_min}, False
    b = optimal_bounds(concatenated_family(tight))
    if args.output:
        save_bank(tight, args.output, title="tightened woven bank")
    ok = max(abs(b.lower - 1), abs(b.upper - 1)) <= PARSEVAL_TOL
    return {"tightened": _bank_vectors(tight), "concatenated_bounds": _bounds(b)}, ok


def cmd_transform(args, inputs, warnings):
    bank = load_bank(args.bank)
    e = load_operator(args.operator)
    inputs.update(bank=args.bank, operator=args.operator)
    try:
        new, cert_bounds = transform_woven(e, bank)
    except InvertibilityError as exc:
        return {"invertible": False, "error": str(exc)}, False
    after = universal_bounds_exhaustive(new)
    expected = e @ woven_frame_operator(bank) @ e.T
    got = woven_frame_operator(new)
    mismatch = float(np.abs(got - expected).max() / max(1.0, np.abs(expected).max()))
    if args.output:
        save_bank(new, args.output, title="transformed bank")
    inside = _contains(cert_bounds, after.bounds)
    result = {
        "invertible": True,
        "certificate_bounds": {"lower": cert_bounds.lower, "upper": cert_bounds.upper},
        "transformed": _certificate(after),
        "within_certificate": inside,
        "frame_operator_mismatch": mismatch,
    }
    return result, inside and after.is_woven and mismatch <= MATCH_RTOL


def cmd_sum_check(args, inputs, warnings):
    bank_f = load_bank(args.bank)
    bank_g = load_bank(args.bank2)
    e1 = load_operator(args.operator1)
    e2 = load_operator(args.operator2)
    inputs.update(bank=args.bank, bank2=args.bank2, operator1=args.operator1, operator2=args.operator2)
    h, rank_ok, cert = sum_woven_check(e1, bank_f, e2, bank_g)
    s = sum_operator(e1, bank_f, e2, bank_g)
    dec = sym_eigen(s)
    direct = frame_operator(concatenated_family(h))
    mismatch = float(np.abs(s - direct).max() / max(1.0, np.abs(direct).max()))
    psd = dec.lambda_min >= -1e-10 * (1 + dec.lambda_max)
    result = {
        "combined_rank_ok": rank_ok,
        "certificate": _certificate(cert),
        "sum_operator": {
            "lambda_min": dec.lambda_min,
            "lambda_max": dec.lambda_max,
            "positive_semidefinite": bool(psd),
            "mismatch_vs_sum_bank": mismatch,
        },
    }
    return result, rank_ok and cert.is_woven and psd and mismatch <= MATCH_RTOL


def _projection_report(bank, w):
    ambient = universal_bounds_exhaustive(bank)
    projected, restricted = project_bank(w, bank)
    inside = _contains(ambient.bounds, restricted.bounds)
    result = {
        "subspace_dim": w.k,
        "basis_columns": w.columns.tolist(),
        "ambient": _certificate(ambient),
        "restricted": _certificate(restricted),
        "within_ambient": inside,
    }
    return projected, result, ambient.is_woven and restricted.is_woven and inside


def cmd_project(args, inputs, warnings):
    bank = load_bank(args.bank)
    w = load_subspace(args.subspace)
    inputs.update(bank=args.bank, subspace=args.subspace)
    projected, result, ok = _projection_report(bank, w)
    if args.output:
        save_bank(projected, args.output, title="projected bank (subspace coordinates)")
    return result, ok


def cmd_intersect(args, inputs, warnings):
    bank = load_bank(args.bank)
    v = load_subspace(args.subspace)
    w = load_subspace(args.subspace2)
    inputs.update(bank=args.bank, subspace=args.subspace, subspace2=args.subspace2)
    try:
        both = subspace_intersection(v, w)
    except EmptyIntersectionError as exc:
        return {"error": str(exc), "subspace_dim": 0}, False
    projected, result, ok = _projection_report(bank, both)
    if args.output:
        save_bank(projected, args.output, title="bank projected onto the intersection")
    return result, ok


# -- parser and report plumbing ------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="woven", description="Woven frame verification tool.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("bank", help="bank JSON file")
        p.set_defaults(func=func)
        return p

    p = add("bounds", cmd_bounds, "optimal bounds of each frame")
    p.add_argument("--frame", help="only report this frame")

    p = add("weave", cmd_weave, "weaving for one partition and its bounds")
    p.add_argument("--partition", required=True, help="comma-separated block labels, e.g. 0,0,1")

    p = add("verify-woven", cmd_verify_woven, "universal woven bounds")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate every partition (default)")
    mode.add_argument("--samples", type=int, metavar="N", help="sample N random partitions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table", action="store_true", help="include the per-partition table")

    for name, func, help_ in (
        ("dual", cmd_dual, "standard dual woven bank"),
        ("tighten", cmd_tighten, "tight (Parseval) woven bank"),
    ):
        p = add(name, func, help_)
        p.add_argument("--output", help="write the resulting bank here")

    p = add("transform", cmd_transform, "apply an invertible operator to the bank")
    p.add_argument("--operator", required=True)
    p.add_argument("--output")

    p = add("sum-check", cmd_sum_check, "check that E1 f_ij + E2 g_ij is woven")
    p.add_argument("--bank2", required=True)
    p.add_argument("--operator1", required=True)
    p.add_argument("--operator2", required=True)

    p = add("project", cmd_project, "project the bank onto a subspace")
    p.add_argument("--subspace", required=True)
    p.add_argument("--output")

    p = add("intersect", cmd_intersect, "project the bank onto the intersection of two subspaces")
    p.add_argument("--subspace", required=True)
    p.add_argument("--subspace2", required=True)
    p.add_argument("--output")
    return parser


def report_body(report: dict) -> dict:
    """The report without its wall-clock entry; stable across identical runs."""
    return {k: v for k, v in report.items() if k != TIMING_KEY}


def _flatten(prefix, value, lines):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, lines)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, lines)
    else:
        lines.append(f"{prefix}: {json.dumps(value)}")


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    lines = []
    _flatten("", report, lines)
    return "\n".join(lines) + "\n"


def run_command(argv=None):
    """Parse ``argv`` and run it. Returns ``(report or None, exit code)``."""
    report, code, _ = _run(argv)
    return report, code


def _run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, int(exc.code or 0), None
    start = time.perf_counter()
    inputs, warnings = {}, []
    try:
        result, ok = args.func(args, inputs, warnings)
    except WovenError as exc:
        print(f"woven: error: {exc}", file=sys.stderr)
        return None, 2, args
    report = {
        "command": args.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "inputs": {k: {"path": v, "sha256": file_digest(v)} for k, v in inputs.items()},
        "result": result,
        "verified": bool(ok),
        "warnings": warnings,
        "tolerances": {
            "rank_rtol": RANK_RTOL,
            "containment_rtol": CONTAINMENT_RTOL,
            "reconstruction_rtol": RECONSTRUCTION_RTOL,
            "parseval_tol": PARSEVAL_TOL,
            "match_rtol": MATCH_RTOL,
            "enumeration_cap": enumeration_cap(),
        },
        TIMING_KEY: round(time.perf_counter() - start, 6),
    }
    return report, 0 if ok else 1, args


def main(argv=None) -> int:
    report, code, args = _run(argv)
    if report is not None:
        sys.stdout.write(render(report, args.format))
        for w in report["warnings"]:
            print(f"woven: warning: {w}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
