"""Command-line entry point: ``latticedec {verify,green,resolvent,report,spectrum}``.

Exit status is 0 on success, 1 when a check or verdict fails and 2 for usage
or configuration errors (including lambda on the spectrum).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .cochain import CochainFormatError, load_cochain, max_abs_diff, save_cochain
from .green import SpectrumError, apply_shifted_operator, green_component, make_context, resolvent_apply
from .oracle import (
    OracleConfig,
    OracleDisagreementError,
    OracleError,
    compare_kernels,
    fourier_green,
    truncated_resolvent_solve,
)
from .spectral import operator_norm_estimate
from .verify import run_suite

_VALUED_FLAGS = ("--lambda",)


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``"re,im"`` or a bare real."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im' or a real number, got {text!r}")


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return fmt(z.real) if z.imag == 0 else f"{fmt(z.real)},{fmt(z.imag)}"


def _join_valued_flags(argv):
    # "--lambda -4,0" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUED_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _context_or_exit(lam):
    try:
        return make_context(lam)
    except SpectrumError as exc:
        raise UsageError(str(exc)) from None


def _oracle_config(args) -> OracleConfig:
    return OracleConfig(n_trunc=args.n_trunc, quadrature_points=args.quad_points, solver_tol=args.solver_tol)


def cmd_verify(args, out) -> int:
    checks = run_suite(args.suite, n=args.n, seed=args.seed, lam=args.lam)
    ok = all(c.passed for c in checks)
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["property", "residual", "tolerance", "passed", "detail"])
        for c in checks:
            writer.writerow([c.name, fmt(c.residual), fmt(c.tolerance), int(c.passed), c.detail])
    else:
        payload = {
            "suite": args.suite,
            "n": args.n,
            "seed": args.seed,
            "lambda": [args.lam.real, args.lam.imag],
            "passed": ok,
            "checks": [c.as_dict() for c in checks],
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    return 0 if ok else 1


def cmd_green(args, out) -> int:
    ctx = _context_or_exit(args.lam)
    cfg = _oracle_config(args)
    a, b = args.k - args.m, args.s - args.n
    if args.source == "formula":
        value = green_component(args.k, args.s, args.m, args.n, ctx)
    elif args.source == "solve":
        col = truncated_resolvent_solve((args.m, args.n), ctx, cfg)
        value = col.at(args.k, args.s)
    else:
        value = fourier_green(a, b, ctx.lam, cfg)
    out.write(fmt_complex(value) + "\n")
    return 0


def cmd_resolvent(args, out) -> int:
    try:
        phi = load_cochain(args.input)
    except (OSError, CochainFormatError, ValueError) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    if phi.degree != 0:
        raise UsageError("resolvent input must be a 0-form")
    ctx = _context_or_exit(args.lam)
    source = "oracle" if args.kernel == "oracle" else "closed-form"
    image = resolvent_apply(phi, ctx, source)
    save_cochain(image, args.out)
    summary = {"output": str(args.out), "n": image.n, "kernel": source}
    status = 0
    if args.check:
        recovered = apply_shifted_operator(image, ctx.lam)
        on_support = max_abs_diff(recovered.resized(phi.n), phi)
        overall = max_abs_diff(recovered, phi)
        summary.update(
            recovery_residual_on_support=on_support,
            recovery_residual_window=overall,
            check_tol=args.check_tol,
            passed=on_support <= args.check_tol,
        )
        status = 0 if on_support <= args.check_tol else 1
    out.write(json.dumps(summary, indent=2) + "\n")
    return status


def cmd_report(args, out) -> int:
    ctx = _context_or_exit(args.lam)
    try:
        report = compare_kernels(ctx, args.w, args.tol, _oracle_config(args))
    except OracleDisagreementError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    text = report.to_json()
    csv_text = report.to_csv()
    if args.out is None:
        out.write(text)
    else:
        path = Path(args.out)
        path.write_text(text)
        csv_path = Path(args.csv) if args.csv else path.with_suffix(".csv")
        csv_path.write_text(csv_text)
        out.write(f"wrote {path} and {csv_path}\n")
    return 0


def cmd_spectrum(args, out) -> int:
    rows = []
    for n in args.n:
        if n < 1:
            raise UsageError("window half-widths must be >= 1")
        est = operator_norm_estimate(args.degree, n, args.max_iter, args.tol)
        rows.append((n, est))
    if args.format == "json":
        payload = [
            {"n": n, "estimate": e.estimate, "iterations": e.iterations, "final_increment": e.final_increment}
            for n, e in rows
        ]
        out.write(json.dumps({"degree": args.degree, "tol": args.tol, "rows": payload}, indent=2) + "\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "estimate", "iterations", "final_increment", "gap_to_8"])
        for n, e in rows:
            writer.writerow([n, fmt(e.estimate), e.iterations, fmt(e.final_increment), fmt(8 - e.estimate)])
    return 0


def _add_oracle_flags(p):
    p.add_argument("--n-trunc", type=int, default=64, help="initial truncation half-width for the solve oracle")
    p.add_argument("--quad-points", type=int, default=64, help="initial quadrature points per axis")
    p.add_argument("--solver-tol", type=float, default=1e-12)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latticedec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("--suite", choices=("all", "calculus", "spectral", "green"), default="all")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=parse_complex, default=complex(-4))
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("green", help="evaluate one resolvent kernel value")
    for name in ("k", "s", "m", "n"):
        p.add_argument(name, type=int)
    p.add_argument("--lambda", dest="lam", type=parse_complex, required=True)
    p.add_argument("--source", choices=("formula", "solve", "fourier"), default="formula")
    _add_oracle_flags(p)
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("resolvent", help="apply the resolvent to a 0-form file")
    p.add_argument("input")
    p.add_argument("--lambda", dest="lam", type=parse_complex, required=True)
    p.add_argument("--kernel", choices=("closed-form", "oracle"), default="oracle")
    p.add_argument("--out", required=True)
    p.add_argument("--check", action="store_true")
    p.add_argument("--check-tol", type=float, default=1e-7)
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("report", help="audit the closed-form kernel against both oracles")
    p.add_argument("--lambda", dest="lam", type=parse_complex, required=True)
    p.add_argument("--w", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default=None, help="JSON report path (stdout if omitted)")
    p.add_argument("--csv", default=None, help="CSV grid path (default: report path with .csv)")
    _add_oracle_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("spectrum", help="operator-norm convergence table")
    p.add_argument("--degree", type=int, choices=(0, 1, 2), default=0)
    p.add_argument("--n", type=parse_int_list, default=[2, 4, 8, 16, 32])
    p.add_argument("--max-iter", type=int, default=200_000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    argv = _join_valued_flags(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, OracleError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
