"""Runs every rank route and factorization check on one matrix and gathers a report."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .core import (
    ORACLE_MAX_DIM,
    Matrix,
    ToleranceContext,
    factors_equal,
    matmul,
    rank_oracle,
    relative_residual,
    transpose,
)
from .elimination import cr_decompose, prove_rank_equality_via_cr, rank, rref
from .mmio import format_scalar
from .orthogonalization import lq, qr
from .report import RankReportEntry, stopwatch
from .skeleton import cur_decompose, cur_matches
from .subspaces import four_subspaces, prove_rank_equality_elementary
from .utv import SPLITS, rank_decompose, ulv, urv, prove_rank_equality_via_ulv

SCHEMA_VERSION = 1

# Float-mode bounds, relative to ||A||_F (orthogonality is an absolute max-entry bound).
QR_RTOL = 1e-10
CR_RTOL = 1e-10
ORTHO_ATOL = 1e-10
UTV_RTOL = 1e-9
CUR_RTOL = 1e-9
RANKDEC_RTOL = 1e-9


@dataclass
class FactorCheck:
    checks: dict[str, bool] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    skipped: str | None = None
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "skipped": self.skipped,
            "error": self.error,
            "checks": dict(sorted(self.checks.items())),
            "residuals": dict(sorted(self.residuals.items())),
        }


@dataclass
class VerificationReport:
    input_digest: str
    mode: str
    shape: tuple[int, int]
    entries: list[RankReportEntry] = field(default_factory=list)
    factor_checks: dict[str, FactorCheck] = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(e.passed for e in self.entries) and all(c.passed for c in self.factor_checks.values())

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "input_digest": self.input_digest,
            "mode": self.mode,
            "shape": list(self.shape),
            "entries": [e.to_dict() for e in sorted(self.entries, key=lambda e: e.route)],
            "factor_checks": {k: self.factor_checks[k].to_dict() for k in sorted(self.factor_checks)},
            "overall": self.overall,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def matrix_digest(a: Matrix) -> str:
    """SHA-256 of a canonical text rendering (shape, regime, row-major entries)."""
    h = hashlib.sha256(f"{a.nrows}x{a.ncols}:{a.regime}\n".encode())
    for r in a.rows():
        h.update((",".join(format_scalar(x) for x in r) + "\n").encode())
    return "sha256:" + h.hexdigest()


def _close(approx: Matrix, target: Matrix, rtol: float, name: str, fc: FactorCheck, tol=None) -> None:
    fc.checks[name] = factors_equal(approx, target, rtol, tol)
    if not target.exact:
        fc.residuals[name] = relative_residual(approx, target)


def _max_abs_dev(x: Matrix, target: Matrix) -> float:
    return float((x - target).max_abs())


def _orthogonal_check(gram: Matrix, sq_norms: tuple, name: str, fc: FactorCheck) -> None:
    target = Matrix.diag(sq_norms, gram.exact)
    if gram.exact:
        fc.checks[name] = gram == target
    else:
        dev = _max_abs_dev(gram, Matrix.identity(gram.nrows, False))
        fc.residuals[name] = dev
        fc.checks[name] = dev <= ORTHO_ATOL


def upper_triangular(t: Matrix) -> bool:
    return all(t[i, j] == 0 for i in range(t.nrows) for j in range(min(i, t.ncols)))


def lower_triangular(t: Matrix) -> bool:
    return upper_triangular(transpose(t))


def check_qr(a: Matrix, tol: ToleranceContext | None = None) -> FactorCheck:
    fc = FactorCheck()
    if a.nrows < a.ncols:
        fc.skipped = "qr needs m >= n"
        return fc
    for mode in ("reduced", "full"):
        f = qr(a, mode, tol)
        _close(matmul(f.q, f.r), a, QR_RTOL, f"{mode}_a_equals_qr", fc, tol)
        _orthogonal_check(matmul(transpose(f.q), f.q), f.sq_norms, f"{mode}_qtq", fc)
        fc.checks[f"{mode}_r_upper"] = upper_triangular(f.r)
        if mode == "full":
            gram = matmul(f.q, transpose(f.q))
            if a.exact:
                # Q D^{-1} Q^T == I is the root-free form of Q Q^T == I
                scaled = matmul(f.q, matmul(Matrix.diag([1 / d for d in f.sq_norms], True), transpose(f.q)))
                fc.checks["full_qqt"] = scaled == Matrix.identity(a.nrows)
            else:
                _orthogonal_check(gram, f.sq_norms, "full_qqt", fc)
    return fc


def check_lq(a: Matrix, tol: ToleranceContext | None = None) -> FactorCheck:
    fc = FactorCheck()
    if a.ncols < a.nrows:
        fc.skipped = "lq needs n >= m"
        return fc
    for mode in ("reduced", "full"):
        f = lq(a, mode, tol)
        _close(matmul(f.l, f.q), a, QR_RTOL, f"{mode}_a_equals_lq", fc, tol)
        _orthogonal_check(matmul(f.q, transpose(f.q)), f.sq_norms, f"{mode}_qqt", fc)
        fc.checks[f"{mode}_l_lower"] = lower_triangular(f.l)
    return fc


def check_utv(a: Matrix, tol: ToleranceContext | None = None, shape: str = "lower") -> FactorCheck:
    fc = FactorCheck()
    f = ulv(a, tol) if shape == "lower" else urv(a, tol)
    _close(f.reconstruct(), a, UTV_RTOL, "a_equals_utv", fc, tol)
    _close(f.reconstruct_reduced(), a, UTV_RTOL, "a_equals_reduced_utv", fc, tol)
    _orthogonal_check(matmul(transpose(f.u), f.u), f.u_sq_norms, "utu", fc)
    _orthogonal_check(matmul(f.v, transpose(f.v)), f.v_sq_norms, "vvt", fc)
    r = f.rank
    fc.checks["core_triangular"] = lower_triangular(f.core) if shape == "lower" else upper_triangular(f.core)
    fc.checks["t_zero_outside_core"] = all(
        f.t[i, j] == 0 for i in range(a.nrows) for j in range(a.ncols) if i >= r or j >= r
    )
    fc.checks["rank_matches_rref"] = r == rref(a if shape == "lower" else transpose(a), tol).rank
    return fc


def check_cr(a: Matrix, tol: ToleranceContext | None = None) -> FactorCheck:
    fc = FactorCheck()
    f = cr_decompose(a, tol)
    _close(matmul(f.c, f.r), a, CR_RTOL, "a_equals_cr", fc, tol)
    fc.checks["c_verbatim"] = f.c == a.select_columns(f.pivot_cols)
    fc.checks["r_pivot_block_identity"] = f.r.select_columns(f.pivot_cols) == Matrix.identity(f.rank, a.exact)
    return fc


def check_cur(a: Matrix, tol: ToleranceContext | None = None) -> FactorCheck:
    fc = FactorCheck()
    f = cur_decompose(a, tol)
    fc.checks["verbatim_slices"] = (
        f.c == a.select_columns(f.col_idx)
        and f.r == a.select_rows(f.row_idx)
        and f.u == a.submatrix(f.row_idx, f.col_idx)
    )
    _close(f.reconstruct(), a, CUR_RTOL, "a_equals_cuinvr", fc, tol)
    fc.checks["c_matches_cr"] = f.c == cr_decompose(a, tol).c
    fc.checks["cur_consistent"] = cur_matches(a, f, tol)
    return fc


def check_rankdec(a: Matrix, tol: ToleranceContext | None = None) -> FactorCheck:
    fc = FactorCheck()
    for split in SPLITS:
        f = rank_decompose(a, tol, split)
        _close(matmul(f.d, f.f), a, RANKDEC_RTOL, f"{split}_a_equals_df", fc, tol)
        fc.checks[f"{split}_full_rank"] = rank(f.d, tol) == rank(transpose(f.f), tol) == f.rank
    return fc


def check_subspaces(a: Matrix, tol: ToleranceContext | None = None) -> FactorCheck:
    return FactorCheck(checks=four_subspaces(a, tol).check(a, tol))


FACTOR_CHECKS = {
    "cr": check_cr,
    "cur": check_cur,
    "lq": check_lq,
    "qr": check_qr,
    "rankdec": check_rankdec,
    "subspaces": check_subspaces,
    "ulv": lambda a, tol=None: check_utv(a, tol, "lower"),
    "urv": lambda a, tol=None: check_utv(a, tol, "upper"),
}


def oracle_entry(a: Matrix, tol: ToleranceContext | None = None) -> RankReportEntry:
    with stopwatch() as elapsed:
        col_rank = rank_oracle(a, tol)
        row_rank = rank_oracle(transpose(a), tol)
    return RankReportEntry(route="oracle", row_rank=row_rank, col_rank=col_rank, timing_ms=elapsed[0])


def _describe(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


ROUTE_FUNCTIONS = {
    "elementary": prove_rank_equality_elementary,
    "ulv": prove_rank_equality_via_ulv,
    "cr": prove_rank_equality_via_cr,
    "oracle": oracle_entry,
}


def rank_entries(a: Matrix, tol: ToleranceContext | None = None) -> list[RankReportEntry]:
    """One entry per route; a route that raises becomes a failed entry, never an exception."""
    routes = ["elementary", "ulv", "cr"]
    if min(a.shape) <= ORACLE_MAX_DIM:
        routes.append("oracle")
    return [run_route(route, a, tol) for route in routes]


def run_route(route: str, a: Matrix, tol: ToleranceContext | None = None) -> RankReportEntry:
    try:
        return ROUTE_FUNCTIONS[route](a, tol)
    except Exception as exc:  # noqa: BLE001 - report contents, not a crash
        return RankReportEntry(route=route, row_rank=None, col_rank=None, error=_describe(exc))


def run_factor_check(name: str, a: Matrix, tol: ToleranceContext | None = None) -> FactorCheck:
    try:
        return FACTOR_CHECKS[name](a, tol)
    except Exception as exc:  # noqa: BLE001
        return FactorCheck(error=_describe(exc))


def verify_all(a: Matrix, tol: ToleranceContext | None = None) -> VerificationReport:
    """Three rank routes, the oracle when small enough, and every factorization check.

    Nothing raises: a failing computation shows up as a failed entry or check.
    """
    report = VerificationReport(matrix_digest(a), a.regime, a.shape)
    report.entries = rank_entries(a, tol)
    for name in FACTOR_CHECKS:
        report.factor_checks[name] = run_factor_check(name, a, tol)
    ranks = {e.row_rank for e in report.entries} | {e.col_rank for e in report.entries}
    report.factor_checks["ranks_agree"] = FactorCheck(checks={"all_routes_same_rank": len(ranks) == 1})
    return report
