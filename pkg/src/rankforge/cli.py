"""Command-line front end.

Exit codes: 0 all checks passed, 1 a verification check failed, 2 usage error,
3 the input could not be read or parsed.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from .core import Matrix, ToleranceContext
from .elimination import cr_decompose, rref
from .mmio import FORMATS, MatrixParseError, format_scalar, parse_csv_text, parse_matrix, write_matrix
from .orthogonalization import lq, qr
from .skeleton import cur_decompose
from .subspaces import four_subspaces, split_vector
from .utv import SPLITS, rank_decompose, ulv, urv
from .verify import FactorCheck, VerificationReport, matrix_digest, run_factor_check, run_route, verify_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3
TOL_ENV = "RANKFORGE_TOL"

COMMANDS = ("rank", "rref", "cr", "qr", "lq", "ulv", "urv", "rankdec", "cur", "subspaces", "split", "verify")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rankforge", description="Rank-revealing factorizations and rank checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("path", help="input matrix file")
    p.add_argument("--mode", choices=("exact", "float"), help="scalar regime (default: from the literals)")
    p.add_argument("--tol", type=float, help=f"float-mode zero tolerance (fallback: ${TOL_ENV}, then 1e-10)")
    p.add_argument("--format", choices=FORMATS, help="input format (default: from the file suffix)")
    p.add_argument("--out", help="path prefix for factor files, written as <prefix>_<factor>.mtx")
    p.add_argument("--json", action="store_true", help="print the verification report as JSON")
    p.add_argument("--full", action="store_true", help="qr/lq: full instead of reduced factors")
    p.add_argument("--split", choices=SPLITS, default="DL_F", help="rankdec: which factor absorbs L")
    p.add_argument("--vector", help="split: comma-separated entries of x")
    return p


def _tolerance(args, a: Matrix) -> ToleranceContext | None:
    raw = args.tol
    if raw is not None and a.exact:
        raise UsageError("--tol only applies in float mode")
    if raw is None and not a.exact and os.environ.get(TOL_ENV):
        try:
            raw = float(os.environ[TOL_ENV])
        except ValueError:
            raise UsageError(f"${TOL_ENV} is not a number: {os.environ[TOL_ENV]!r}") from None
    if a.exact or raw is None:
        return None
    try:
        return ToleranceContext(zero_tol=raw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _factor_outputs(command: str, a: Matrix, tol, args) -> dict[str, Matrix]:
    """Factors written to disk (or printed) for a factorization command."""
    exact = a.exact

    def norms(name, values):
        # exact orthogonal factors are unnormalized; ship their squared column lengths
        return {name: Matrix([list(values)], ncols=len(values), exact=exact)} if exact else {}

    if command == "rref":
        rr = rref(a, tol)
        return {"R0": rr.r0, "E": rr.row_ops}
    if command == "cr":
        f = cr_decompose(a, tol)
        return {"C": f.c, "R": f.r}
    if command == "qr":
        f = qr(a, "full" if args.full else "reduced", tol)
        return {"Q": f.q, "R": f.r, **norms("Qnorm2", f.sq_norms)}
    if command == "lq":
        f = lq(a, "full" if args.full else "reduced", tol)
        return {"L": f.l, "Q": f.q, **norms("Qnorm2", f.sq_norms)}
    if command in ("ulv", "urv"):
        f = ulv(a, tol) if command == "ulv" else urv(a, tol)
        return {"U": f.u, "T": f.t, "V": f.v, **norms("Unorm2", f.u_sq_norms), **norms("Vnorm2", f.v_sq_norms)}
    if command == "rankdec":
        f = rank_decompose(a, tol, args.split)
        return {"D": f.d, "F": f.f}
    if command == "cur":
        f = cur_decompose(a, tol)
        return {"C": f.c, "Uc": f.u, "Rr": f.r}
    if command == "subspaces":
        s = four_subspaces(a, tol)
        return {"col": s.col_basis, "row": s.row_basis, "null": s.null_basis, "leftnull": s.left_null_basis}
    if command == "split":
        if not args.vector:
            raise UsageError("split needs --vector")
        try:
            x = parse_csv_text(args.vector, mode=a.regime)
        except MatrixParseError:
            raise UsageError(f"--vector is not a list of numbers: {args.vector!r}") from None
        if x.nrows != 1 or x.ncols != a.ncols:
            raise UsageError(f"--vector has {x.ncols} entries, matrix has {a.ncols} columns")
        x_r, x_n = split_vector(a, x.row(0), tol)
        return {"xr": Matrix.column(x_r, exact=exact), "xn": Matrix.column(x_n, exact=exact)}
    raise AssertionError(command)


def _split_check(a: Matrix, outputs: dict, tol) -> FactorCheck:
    x_r, x_n = outputs["xr"], outputs["xn"]
    return FactorCheck(
        checks={
            "a_kills_xn": (a @ x_n).is_zero(tol),
            "xr_in_row_space": rref(a, tol).rank == rref(a.vstack(x_r.T), tol).rank,
        }
    )


def _report_for(command: str, a: Matrix, tol, outputs: dict) -> VerificationReport:
    if command == "verify":
        return verify_all(a, tol)
    report = VerificationReport(matrix_digest(a), a.regime, a.shape)
    if command == "rank":
        report.entries.append(run_route("cr", a, tol))
    elif command == "rref":
        rr_ok = (outputs["E"] @ a) == outputs["R0"] if a.exact else True
        report.factor_checks["rref"] = FactorCheck(checks={"row_ops_times_a_is_r0": rr_ok})
    elif command == "split":
        report.factor_checks["split"] = _split_check(a, outputs, tol)
    else:
        report.factor_checks[command] = run_factor_check(command, a, tol)
    return report


def _render(m: Matrix) -> str:
    if m.nrows == 0 or m.ncols == 0:
        return f"  <empty {m.nrows}x{m.ncols}>"
    cells = [[format_scalar(x) if not m.exact else str(x) for x in r] for r in m.rows()]
    width = max(len(c) for r in cells for c in r)
    return "\n".join("  " + " ".join(c.rjust(width) for c in r) for r in cells)


def run_command(argv: list[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with redirect_stdout(stdout), redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    try:
        a = parse_matrix(args.path, args.format, args.mode)
    except MatrixParseError as exc:
        print(f"rankforge: {args.path}: {exc}", file=stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"rankforge: cannot read {args.path}: {exc.strerror or exc}", file=stderr)
        return EXIT_PARSE

    try:
        tol = _tolerance(args, a)
        outputs = {} if args.command in ("rank", "verify") else _factor_outputs(args.command, a, tol, args)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"rankforge: error: {exc}", file=stderr)
        return EXIT_USAGE

    report = _report_for(args.command, a, tol, outputs)

    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        for name, m in outputs.items():
            write_matrix(m, f"{prefix}_{name}.mtx", "mm", comment=f"rankforge {args.command} factor {name} ({a.regime})")

    if args.json:
        print(report.to_json(), file=stdout)
    else:
        if args.command in ("rank", "verify"):
            for e in sorted(report.entries, key=lambda e: e.route):
                status = "pass" if e.passed else "FAIL"
                print(f"{e.route:<11} row_rank={e.row_rank} col_rank={e.col_rank} {status}", file=stdout)
        for name, m in outputs.items():
            if not args.out:
                print(f"{name} ({m.nrows}x{m.ncols}):\n{_render(m)}", file=stdout)
        for name, fc in sorted(report.factor_checks.items()):
            status = "skipped" if fc.skipped else ("pass" if fc.passed else "FAIL")
            print(f"check {name}: {status}", file=stdout)
        print(f"overall: {'pass' if report.overall else 'FAIL'}", file=stdout)
    return EXIT_OK if report.overall else EXIT_FAIL


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
