"""Command line front end: matrix ingestion, measure computation, signed
scans, identity verification, and deterministic report emission.

Exit codes: 0 success (and every verification passed), 1 input/validation
error, 2 a verification failed beyond tolerance, 3 an enumeration cap was
exceeded.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import coneig, measures, oracle, signed
from .errors import (
    CondmeasError,
    EnumerationCapError,
    MatrixParseError,
)
from .linalg import DEFAULT_TOL, Tolerances
from .measures import MeasureResult
from .oracle import RngConfig
from .signed import VerificationReport, make_report

MEASURE_FUNCS = {
    "chi": measures.chi,
    "chibar": measures.chibar,
    "hoffman": measures.hoffman,
    "hoffmanbar": measures.hoffmanbar,
    "renegar": measures.renegar_distance,
    "grassmann": measures.grassmann,
}

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2
EXIT_CAP = 3


def parse_matrix(path: str, fmt: str | None = None) -> np.ndarray:
    """Load a matrix from a CSV (one row per line, no header) or JSON
    ({"rows": [[...], ...]}) file.  Rejects ragged rows, NaN/Inf and empty
    input with messages naming the offending location."""
    if fmt is None:
        ext = os.path.splitext(path)[1].lower()
        if ext == ".csv":
            fmt = "csv"
        elif ext == ".json":
            fmt = "json"
        else:
            raise MatrixParseError(
                f"{path}: cannot infer format from extension {ext!r}; "
                "pass --format csv|json"
            )
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "csv":
        rows = _parse_csv(path, text)
    elif fmt == "json":
        rows = _parse_json(path, text)
    else:
        raise MatrixParseError(f"unknown format {fmt!r}")
    if not rows:
        raise MatrixParseError(f"{path}: empty input")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MatrixParseError(
                f"{path}: line {i + 1}: row has {len(row)} entries, expected {width}"
            )
        for j, x in enumerate(row):
            if not math.isfinite(x):
                raise MatrixParseError(
                    f"{path}: line {i + 1}, column {j + 1}: non-finite value {x!r}"
                )
    return np.array(rows, dtype=float)


def _parse_csv(path, text):
    rows = []
    for i, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        row = []
        for j, cell in enumerate(line.split(",")):
            try:
                row.append(float(cell))
            except ValueError:
                raise MatrixParseError(
                    f"{path}: line {i + 1}, column {j + 1}: "
                    f"not a decimal literal: {cell.strip()!r}"
                ) from None
        rows.append(row)
    return rows


def _parse_json(path, text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict) or "rows" not in doc:
        raise MatrixParseError(f'{path}: expected an object with a "rows" key')
    rows = doc["rows"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MatrixParseError(f'{path}: "rows" must be an array of arrays')
    out = []
    for i, row in enumerate(rows):
        vals = []
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise MatrixParseError(
                    f"{path}: rows[{i}][{j}]: not a number: {x!r}"
                )
            vals.append(float(x))
        out.append(vals)
    return out


def _parse_vector(text: str, flag: str) -> np.ndarray:
    try:
        vals = [float(c) for c in text.split(",")]
    except ValueError:
        raise MatrixParseError(f"{flag}: expected comma-separated decimals, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise MatrixParseError(f"{flag}: non-finite value in {text!r}")
    return np.array(vals)


def serialize(obj, pretty: bool = False) -> str:
    """Deterministic report text: sorted keys, floats at 17 significant
    digits (lossless for doubles)."""
    pieces = []
    _emit(obj, pieces, 0, pretty)
    return "".join(pieces)


def _emit(obj, out, depth, pretty):
    nl = "\n" + "  " * (depth + 1) if pretty else ""
    end = "\n" + "  " * depth if pretty else ""
    if isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append("," if pretty else ", ")
            out.append(nl)
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(obj[key], out, depth + 1, pretty)
        out.append(end)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _emit(item, out, depth + 1, False)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format(float(obj), ".17g"))
    else:
        out.append(json.dumps(str(obj)))


def _measure_dict(res: MeasureResult) -> dict:
    return {
        "name": res.name,
        "value": float(res.value),
        "argmax_subset": list(res.argmax_subset) if res.argmax_subset else [],
        "witness": [float(x) for x in np.atleast_1d(res.witness)],
        "degenerate": bool(res.degenerate),
        "notes": list(res.notes),
        "ties": [list(t) for t in res.ties],
    }


def _report_dict(rep: VerificationReport) -> dict:
    return {
        "identity": rep.identity_name,
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "abs_err": rep.abs_err,
        "rel_err": rep.rel_err,
        "passed": rep.passed,
        "witnesses": rep.witnesses,
        "notes": list(rep.notes),
    }


def _input_block(path: str, arr: np.ndarray) -> dict:
    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    return {
        "path": path,
        "m": int(arr.shape[0]),
        "n": int(arr.shape[1]),
        "sha256": digest,
        "rows": [[float(x) for x in row] for row in arr],
    }


def _tol_block(tol: Tolerances) -> dict:
    return dataclasses.asdict(tol)


def _threads_from_env() -> int | None:
    raw = os.environ.get("CONDMEAS_THREADS")
    if raw is None:
        return None
    try:
        val = int(raw)
    except ValueError:
        val = 0
    if val < 1:
        raise CondmeasError(
            f"CONDMEAS_THREADS must be a positive integer, got {raw!r}"
        )
    return val


def _raise_caps():
    # --force raises every enumeration cap; the checks stay in place
    measures.DEFAULT_SUBSET_CAP *= 10
    coneig.DEFAULT_SUPPORT_CAP += 8
    signed.SIGNATURE_CAP += 8


def _write_report(doc: dict, args) -> None:
    text = serialize(doc, pretty=getattr(args, "pretty", False)) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _make_tol(args) -> Tolerances:
    if getattr(args, "tol", None) is not None:
        return dataclasses.replace(DEFAULT_TOL, verify_rtol=args.tol)
    return DEFAULT_TOL


def cmd_compute(args) -> int:
    arr = parse_matrix(args.input, args.format)
    tol = _make_tol(args)
    names = args.measures.split(",") if args.measures else list(MEASURE_FUNCS)
    results = []
    warnings = []
    timings = {}
    for name in names:
        name = name.strip()
        if name not in MEASURE_FUNCS:
            raise CondmeasError(
                f"--measures: unknown measure {name!r}; "
                f"choose from {','.join(MEASURE_FUNCS)}"
            )
        t0 = time.perf_counter()
        res = MEASURE_FUNCS[name](arr, tol, seed=args.seed)
        timings[name] = (time.perf_counter() - t0) * 1e3
        results.append(_measure_dict(res))
        if res.degenerate:
            warnings.append(f"{name}: degenerate eigenspace encountered")
    doc = {
        "command": "compute",
        "input": _input_block(args.input, arr),
        "measures": results,
        "seed": args.seed,
        "tolerances": _tol_block(tol),
        "warnings": warnings,
    }
    if args.timings:
        doc["timings_ms"] = timings
    _write_report(doc, args)
    return EXIT_OK


def cmd_scan_signed(args) -> int:
    arr = parse_matrix(args.input, args.format)
    tol = _make_tol(args)
    value, signature, report = signed.signed_max_hoffman(
        arr, filter_feasible=args.filter_feasible, tol=tol, seed=args.seed
    )
    doc = {
        "command": "scan-signed",
        "input": _input_block(args.input, arr),
        "max_signed_hoffman": float(value),
        "argmax_signature": [int(s) for s in signature],
        "filter_feasible": bool(args.filter_feasible),
        "comparison": _report_dict(report),
        "seed": args.seed,
        "tolerances": _tol_block(tol),
        "warnings": [],
    }
    _write_report(doc, args)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _oracle_reports(arr, tol, cfg: RngConfig) -> list[VerificationReport]:
    """Monte Carlo dominance checks expressed as pass/fail reports: every
    sampled quantity must stay below its exact computed bound."""
    out = []

    def bound(name, sampled, exact, lower=None):
        passed = sampled <= exact * (1 + tol.verify_rtol)
        notes = []
        if lower is not None:
            if sampled < lower * exact:
                passed = False
                notes.append(f"sampled value below required fraction {lower} of exact")
        rel = abs(sampled - exact) / exact if exact else 0.0
        out.append(
            VerificationReport(
                identity_name=name,
                lhs=float(sampled),
                rhs=float(exact),
                abs_err=float(abs(sampled - exact)),
                rel_err=float(rel),
                passed=bool(passed),
                notes=notes,
            )
        )

    chi_res = measures.chi(arr, tol)
    best, _ = oracle.sample_chi_lower(arr, cfg, tol)
    bound("oracle_chi_sample_dominated", best, chi_res.value)
    witness = oracle.directed_chi_witness(arr, chi_res.argmax_subset, tol)
    bound("oracle_chi_directed_witness", witness, chi_res.value, lower=0.999)
    chibar_res = measures.chibar(arr, tol)
    bound("oracle_chibar_sample_dominated", oracle.sample_chibar_lower(arr, cfg, tol),
          chibar_res.value)
    h = measures.hoffman(arr, tol)
    ratio, _ = oracle.hoffman_ratio_sample(arr, cfg, tol)
    bound("oracle_hoffman_ratio_dominated", ratio, h.value)
    hbar = measures.hoffmanbar(arr, tol)
    ratio_bar, _ = oracle.hoffmanbar_ratio_sample(arr, cfg, tol)
    bound("oracle_hoffmanbar_ratio_dominated", ratio_bar, hbar.value)
    gram = arr @ arr.T
    lo, hi = oracle.cone_sample_check(gram, cfg, tol)
    cmin, _ = coneig.cone_min(gram, tol)
    cmax, _ = coneig.cone_max(gram, tol)
    ok = lo >= cmin - 1e-9 and hi <= cmax + 1e-9
    out.append(
        VerificationReport(
            identity_name="oracle_cone_bracket",
            lhs=float(lo),
            rhs=float(hi),
            abs_err=0.0,
            rel_err=0.0,
            passed=bool(ok),
            notes=[
                f"sampled bracket [{lo:.12g}, {hi:.12g}] must lie inside "
                f"[{cmin:.12g}, {cmax:.12g}]"
            ],
        )
    )
    return out


def cmd_verify(args) -> int:
    arr = parse_matrix(args.input, args.format)
    tol = _make_tol(args)
    timings = {}
    t0 = time.perf_counter()
    reports = signed.verify_identities(arr, tol, seed=args.seed)
    timings["identities"] = (time.perf_counter() - t0) * 1e3
    cfg = RngConfig(seed=args.seed, sample_count=args.samples)
    t0 = time.perf_counter()
    reports.extend(_oracle_reports(arr, tol, cfg))
    timings["oracle"] = (time.perf_counter() - t0) * 1e3
    doc = {
        "command": "verify",
        "input": _input_block(args.input, arr),
        "verifications": [_report_dict(r) for r in reports],
        "all_passed": all(r.passed for r in reports),
        "samples": args.samples,
        "seed": args.seed,
        "tolerances": _tol_block(tol),
        "warnings": [n for r in reports for n in r.notes],
    }
    if args.timings:
        doc["timings_ms"] = timings
    _write_report(doc, args)
    return EXIT_OK if doc["all_passed"] else EXIT_VERIFY


def cmd_project(args) -> int:
    arr = parse_matrix(args.input, args.format)
    tol = _make_tol(args)
    x0 = _parse_vector(args.point, "--point")
    b = _parse_vector(args.rhs, "--rhs")
    z = oracle.constrained_lsq(np.eye(arr.shape[1]), x0, arr, b, tol)
    doc = {
        "command": "project",
        "input": _input_block(args.input, arr),
        "point": [float(v) for v in x0],
        "rhs": [float(v) for v in b],
        "projection": [float(v) for v in z],
        "distance": float(np.linalg.norm(z - x0)),
        "tolerances": _tol_block(tol),
        "warnings": [],
    }
    _write_report(doc, args)
    return EXIT_OK


def cmd_wls(args) -> int:
    arr = parse_matrix(args.input, args.format)
    tol = _make_tol(args)
    d = _parse_vector(args.weights, "--weights")
    b = _parse_vector(args.rhs, "--rhs")
    if d.shape[0] != arr.shape[0] or b.shape[0] != arr.shape[0]:
        raise CondmeasError(
            "--weights/--rhs: length must equal the matrix row count"
        )
    pinv = measures.wls_pseudoinverse(arr, d, tol)
    x = pinv @ b
    doc = {
        "command": "wls",
        "input": _input_block(args.input, arr),
        "weights": [float(v) for v in d],
        "rhs": [float(v) for v in b],
        "solution": [float(v) for v in x],
        "residual": float(np.linalg.norm(arr @ x - b)),
        "tolerances": _tol_block(tol),
        "warnings": [],
    }
    _write_report(doc, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condmeas",
        description="Exact condition measures of small dense matrices.",
    )

    def common(sub):
        sub.add_argument("--input", required=True, help="matrix file (.csv or .json)")
        sub.add_argument("--format", choices=["csv", "json"], default=None)
        sub.add_argument("--tol", type=float, default=None,
                         help="override the verification tolerance")
        sub.add_argument("--seed", type=int, default=0)
        sub.add_argument("--output", default=None, help="write the report here")
        sub.add_argument("--pretty", action="store_true")
        sub.add_argument("--force", action="store_true",
                         help="raise the enumeration caps")
        sub.add_argument("--timings", action="store_true",
                         help="include per-phase timings (breaks byte determinism)")

    subs = parser.add_subparsers(dest="command", required=True)
    p = subs.add_parser("compute", help="compute the measures")
    common(p)
    p.add_argument("--measures", default=None,
                   help=f"comma-separated subset of {','.join(MEASURE_FUNCS)}")
    p.set_defaults(func=cmd_compute)

    p = subs.add_parser("scan-signed", help="max of H(SA) over signatures")
    common(p)
    p.add_argument("--filter-feasible", action="store_true")
    p.set_defaults(func=cmd_scan_signed)

    p = subs.add_parser("verify", help="identity and oracle checks")
    common(p)
    p.add_argument("--samples", type=int, default=10000)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("project", help="project a point onto {x : Ax <= b}")
    common(p)
    p.add_argument("--point", required=True)
    p.add_argument("--rhs", required=True)
    p.set_defaults(func=cmd_project)

    p = subs.add_parser("wls", help="weighted least-squares solve")
    common(p)
    p.add_argument("--weights", required=True)
    p.add_argument("--rhs", required=True)
    p.set_defaults(func=cmd_wls)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _threads_from_env()
        if getattr(args, "tol", None) is not None and not 0 < args.tol:
            raise CondmeasError("--tol must be positive")
        if args.force:
            _raise_caps()
        return args.func(args)
    except EnumerationCapError as exc:
        print(f"condmeas: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (MatrixParseError, OSError) as exc:
        print(f"condmeas: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CondmeasError as exc:
        print(f"condmeas: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
