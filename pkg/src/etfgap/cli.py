"""Command-line interface.

Exit codes: 0 pass, 1 domain-level failure (not an ETF, certificate failed,
pair excluded), 2 usage error or unreadable input.
"""

import argparse
import hashlib
import json
import math
import sys

from . import __version__
from .admissibility import scan_table, check_pair, table_to_csv
from .cmx import CmxFormatError, parse_cmx, render_cmx
from .constructions import (
    DifferenceSet,
    harmonic_etf,
    is_difference_set,
    naimark_complement,
    simplex_etf,
    singer_difference_set,
)
from .errors import EtfError
from .frame import Frame
from .gap_certificate import certify
from .matcore import DEFAULT_REL_TOL, DEFAULT_TOL
from .verification import verify_frame

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def dump_json(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _header(data, **tolerances):
    return {
        "tool": {"name": "etfgap", "version": __version__},
        "input_sha256": hashlib.sha256(data).hexdigest(),
        "tolerances": tolerances,
    }


def _load(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
        matrix = parse_cmx(data.decode("ascii"))
        return data, Frame(matrix)
    except (OSError, UnicodeDecodeError, CmxFormatError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _parse_int_list(text):
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"not a list of integers: {text!r}") from None


# -- construct ---------------------------------------------------------------

def _build_frame(args):
    if args.kind == "singer":
        if args.q is None:
            raise UsageError("--kind singer needs --q")
        return harmonic_etf(singer_difference_set(args.q))
    if args.kind == "simplex":
        if args.d is None:
            raise UsageError("--kind simplex needs --d")
        return simplex_etf(args.d)
    if args.set_file is not None:
        try:
            with open(args.set_file, encoding="utf-8") as fh:
                elements = _parse_int_list(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.set_file}: {exc}") from None
    elif args.set is not None:
        elements = _parse_int_list(args.set)
    else:
        raise UsageError("--kind harmonic needs --set or --set-file")
    if args.v is None or args.v < 2:
        raise UsageError("--kind harmonic needs --v >= 2")
    ds = DifferenceSet(args.v, tuple(elements))
    if not is_difference_set(ds.v, ds.elements):
        raise EtfError(f"{list(ds.elements)} is not a difference set mod {ds.v}")
    return harmonic_etf(ds)


def cmd_construct(args, out, err):
    frame = _build_frame(args)
    if args.naimark:
        frame = naimark_complement(frame)
    text = render_cmx(frame.matrix)
    report = verify_frame(frame)
    summary = f"d={frame.d} n={frame.n} alpha={report.alpha_observed:.10f}\n"
    if args.out is None or args.out == "-":
        out.write(text)
        err.write(summary)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
        out.write(summary)
    return EXIT_OK


# -- verify ------------------------------------------------------------------

def format_verification_text(report):
    def mark(ok):
        return "PASS" if ok else "FAIL"

    return "\n".join(
        [
            f"frame: d={report.d} n={report.n} tol={report.tol:g}",
            f"unit_norm    {mark(report.unit_norm_passed)}  residual={report.unit_norm_residual:.3e}",
            f"tight        {mark(report.tight_passed)}  residual={report.tightness_residual:.3e}",
            f"equiangular  {mark(report.equiangular_passed)}  spread={report.equiangularity_spread:.3e}"
            f"  alpha={report.alpha_observed:.10f}",
            f"coherence={report.coherence_observed:.10f} welch_bound={report.welch_bound:.10f}",
            f"result: {'ETF' if report.passed else 'not an ETF'}",
        ]
    ) + "\n"


def cmd_verify(args, out, err):
    data, frame = _load(args.path)
    report = verify_frame(frame, args.tol)
    if args.format == "json":
        payload = _header(data, tol=args.tol)
        payload["report"] = report.to_dict()
        out.write(dump_json(payload))
    else:
        out.write(format_verification_text(report))
    return EXIT_OK if report.passed else EXIT_FAIL


# -- certify-gap -------------------------------------------------------------

def format_certificate_text(rep):
    lines = [f"frame: d={rep.d} n={rep.n} tol={rep.tol:g} rel_tol={rep.rel_tol:g}"]
    if rep.params is not None:
        p = rep.params
        lines.append(
            f"alpha={p.alpha:.10f} gamma={p.gamma_q} mu={p.mu_q} lambda={p.lambda_q}"
            f" window={'yes' if p.in_window else 'no'}"
        )
    for name, status in rep.steps.items():
        lines.append(f"  {name:<17} {status}")
    if rep.rank_K is not None:
        lines.append(f"rank_K={rep.rank_K} nullity_K={rep.nullity_K} rank_R={rep.rank_R}")
        if rep.bound_applicable:
            lines.append(f"bound: n={rep.n} <= d^2-d+1={rep.bound_concluded}")
        else:
            lines.append(f"bound d^2-d+1={rep.bound_concluded}: not-applicable (lambda outside (1/2, 1))")
    if rep.failed_step is not None:
        lines.append(f"FAILED at {rep.failed_step}: {rep.error}")
    lines.append(f"result: {'certified' if rep.passed else 'failed'}")
    return "\n".join(lines) + "\n"


def cmd_certify_gap(args, out, err):
    data, frame = _load(args.path)
    rep = certify(frame, args.tol, args.rel_tol)
    if args.format == "json":
        payload = _header(data, tol=args.tol, rel_tol=args.rel_tol)
        payload["report"] = rep.to_dict()
        out.write(dump_json(payload))
    else:
        out.write(format_certificate_text(rep))
    if not rep.passed:
        err.write(f"certificate failed at step {rep.failed_step}: {rep.error}\n")
        return EXIT_FAIL
    return EXIT_OK


# -- admissible --------------------------------------------------------------

def format_verdict_text(v):
    if v.excluded:
        return f"({v.d},{v.n}) excluded: {', '.join(v.violated)}\n"
    extra = f" (witness: {v.witness})" if v.witness else ""
    return f"({v.d},{v.n}) not-excluded{extra}\n"


def cmd_admissible(args, out, err):
    single = args.d is not None or args.n is not None
    scan = args.dmax is not None or args.nmax is not None
    if single == scan:
        raise UsageError("give either --d and --n, or --dmax and --nmax")
    if single:
        if args.d is None or args.n is None:
            raise UsageError("--d and --n go together")
        try:
            verdict = check_pair(args.d, args.n)
        except EtfError as exc:
            raise UsageError(str(exc)) from None
        if args.format == "json":
            out.write(dump_json(verdict.to_dict()))
        elif args.format == "csv":
            out.write(table_to_csv([verdict]))
        else:
            out.write(format_verdict_text(verdict))
        return EXIT_FAIL if verdict.excluded else EXIT_OK
    if args.dmax is None or args.nmax is None:
        raise UsageError("--dmax and --nmax go together")
    try:
        rows = scan_table(args.dmax, args.nmax)
    except EtfError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        out.write(dump_json([v.to_dict() for v in rows]))
    elif args.format == "csv":
        out.write(table_to_csv(rows))
    else:
        out.writelines(format_verdict_text(v) for v in rows)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="etfgap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"etfgap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build an ETF and write it as cmx-1")
    c.add_argument("--kind", choices=("singer", "simplex", "harmonic"), required=True)
    c.add_argument("--q", type=int, help="prime power for --kind singer")
    c.add_argument("--d", type=int, help="dimension for --kind simplex")
    c.add_argument("--v", type=int, help="modulus for --kind harmonic")
    c.add_argument("--set", help="difference set elements, comma separated")
    c.add_argument("--set-file", help="file with whitespace/comma separated elements")
    c.add_argument("--naimark", action="store_true", help="emit the Naimark complement instead")
    c.add_argument("--out", help="output path (default: standard output)")
    c.set_defaults(func=cmd_construct)

    for name, func, helptext in (
        ("verify", cmd_verify, "check unit norm, tightness and equiangularity"),
        ("certify-gap", cmd_certify_gap, "run the gap certificate pipeline"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("path", help="cmx-1 input file")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        if name == "certify-gap":
            p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(func=func)

    a = sub.add_parser("admissible", help="classify (d, n) against known necessary conditions")
    a.add_argument("--d", type=int)
    a.add_argument("--n", type=int)
    a.add_argument("--dmax", type=int)
    a.add_argument("--nmax", type=int)
    a.add_argument("--format", choices=("text", "csv", "json"), default="text")
    a.set_defaults(func=cmd_admissible)
    return parser


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, out, err)
    except UsageError as exc:
        err.write(f"etfgap: {exc}\n")
        return EXIT_USAGE
    except EtfError as exc:
        err.write(f"etfgap: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
