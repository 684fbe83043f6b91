"""Gauss-Jordan elimination: RREF, the CR factorization, null spaces and the rank normal form."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ORACLE_MAX_DIM,
    Matrix,
    ToleranceContext,
    factors_equal,
    matmul,
    rank_oracle,
    relative_residual,
    transpose,
    zero_threshold,
)
from .report import RankReportEntry, stopwatch


class SingularMatrixError(ValueError):
    """A square matrix expected to be invertible has rank below its size."""


class InconsistentSystemError(ValueError):
    """``A X = B`` has no solution, or more than one."""


@dataclass(frozen=True)
class RrefResult:
    """Row reduced echelon form of ``A`` with the row operations that produced it.

    ``row_ops @ A == r0`` and ``row_ops_inv @ r0 == A`` (exactly in exact mode).
    """

    r0: Matrix
    pivot_cols: tuple[int, ...]
    row_ops: Matrix
    row_ops_inv: Matrix

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)

    @property
    def free_cols(self) -> tuple[int, ...]:
        piv = set(self.pivot_cols)
        return tuple(j for j in range(self.r0.ncols) if j not in piv)

    @property
    def nonzero_rows(self) -> Matrix:
        return self.r0.select_rows(range(self.rank))


def _eliminate(a: Matrix, tol: ToleranceContext | None, track: bool):
    m, n = a.shape
    exact = a.exact
    zero, one = a.zero, a.one
    thresh = zero_threshold(a, tol)
    R = a.to_lists()
    if track:
        E = Matrix.identity(m, exact).to_lists()
        Einv = Matrix.identity(m, exact).to_lists()
    pivots = []
    prow = 0
    for c in range(n):
        if prow == m:
            break
        if exact:
            p = next((i for i in range(prow, m) if R[i][c] != 0), None)
        else:
            p = max(range(prow, m), key=lambda i: abs(R[i][c]))
            if abs(R[p][c]) <= thresh:
                for i in range(prow, m):
                    R[i][c] = zero
                p = None
        if p is None:
            continue
        if p != prow:
            R[p], R[prow] = R[prow], R[p]
            if track:
                E[p], E[prow] = E[prow], E[p]
                for row in Einv:
                    row[p], row[prow] = row[prow], row[p]
        piv = R[prow][c]
        R[prow] = [x / piv for x in R[prow]]
        R[prow][c] = one
        if track:
            E[prow] = [x / piv for x in E[prow]]
            for row in Einv:
                row[prow] = row[prow] * piv
        prow_vals = R[prow]
        for i in range(m):
            if i == prow:
                continue
            f = R[i][c]
            if f == 0:
                continue
            R[i] = [x - f * y for x, y in zip(R[i], prow_vals)]
            R[i][c] = zero
            if track:
                E[i] = [x - f * y for x, y in zip(E[i], E[prow])]
                for row in Einv:
                    row[prow] = row[prow] + f * row[i]
        pivots.append(c)
        prow += 1
    if not exact:
        for i in range(prow, m):
            R[i] = [zero] * n
    r0 = Matrix._raw(tuple(tuple(r) for r in R), n, exact)
    if not track:
        return r0, tuple(pivots), None, None
    to_m = lambda rows: Matrix._raw(tuple(tuple(r) for r in rows), m, exact)  # noqa: E731
    return r0, tuple(pivots), to_m(E), to_m(Einv)


def rref(a: Matrix, tol: ToleranceContext | None = None) -> RrefResult:
    """Row reduced echelon form with pivot columns and accumulated row operations.

    Exact mode pivots on the first nonzero entry of the column; float mode uses
    partial pivoting and treats magnitudes under the scaled threshold as zero.
    """
    return RrefResult(*_eliminate(a, tol, track=True))


def rank(a: Matrix, tol: ToleranceContext | None = None) -> int:
    """Column rank of ``a``: the number of pivot columns in its RREF."""
    return len(_eliminate(a, tol, track=False)[1])


def solve(a: Matrix, b: Matrix, tol: ToleranceContext | None = None) -> Matrix:
    """Solve ``a @ X == b`` for ``a`` with full column rank and ``b`` in its column space."""
    n = a.ncols
    r0, piv, _, _ = _eliminate(a.hstack(b), tol, track=False)
    if tuple(p for p in piv if p < n) != tuple(range(n)):
        raise InconsistentSystemError(f"coefficient matrix {a.shape} does not have full column rank")
    if len(piv) > n:
        raise InconsistentSystemError(f"right-hand side column {piv[n] - n} is not in the column space")
    return r0.submatrix(range(n), range(n, n + b.ncols))


def inverse(a: Matrix, tol: ToleranceContext | None = None) -> Matrix:
    if a.nrows != a.ncols:
        raise ValueError(f"cannot invert non-square {a.shape} matrix")
    rr = rref(a, tol)
    if rr.rank < a.nrows:
        raise SingularMatrixError(f"matrix of size {a.nrows} has rank {rr.rank}")
    return rr.row_ops


@dataclass(frozen=True)
class CRFactors:
    """``A == c @ r`` with ``c`` the pivot columns of ``A`` and ``r`` its RREF minus zero rows."""

    c: Matrix
    r: Matrix
    pivot_cols: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)

    @property
    def storage(self) -> int:
        m, n = self.c.nrows, self.r.ncols
        return self.rank * (m + n)


def cr_decompose(a: Matrix, tol: ToleranceContext | None = None, rr: RrefResult | None = None) -> CRFactors:
    rr = rr or rref(a, tol)
    return CRFactors(c=a.select_columns(rr.pivot_cols), r=rr.nonzero_rows, pivot_cols=rr.pivot_cols)


def null_space_basis(a: Matrix, tol: ToleranceContext | None = None, rr: RrefResult | None = None) -> Matrix:
    """``n x (n - r)`` basis of ``N(a)``: one special solution per free column."""
    rr = rr or rref(a, tol)
    n = a.ncols
    zero, one = a.zero, a.one
    cols = []
    for f in rr.free_cols:
        x = [zero] * n
        x[f] = one
        for i, p in enumerate(rr.pivot_cols):
            x[p] = -rr.r0[i, f]
        cols.append(x)
    return Matrix.from_columns(cols, n, a.exact)


def rank_block(m: int, n: int, r: int, exact: bool = True) -> Matrix:
    """The ``m x n`` matrix ``[[I_r, 0], [0, 0]]``."""
    z, o = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    return Matrix._raw(tuple(tuple(o if i == j and i < r else z for j in range(n)) for i in range(m)), n, exact)


@dataclass(frozen=True)
class RankNormalForm:
    """``A == e1 @ rank_block(m, n, core_rank) @ e2`` with ``e1``, ``e2`` invertible."""

    e1: Matrix
    core_rank: int
    e2: Matrix

    def block(self) -> Matrix:
        return rank_block(self.e1.nrows, self.e2.ncols, self.core_rank, self.e1.exact)

    def reconstruct(self) -> Matrix:
        return matmul(self.e1, matmul(self.block(), self.e2))


def rank_normal_form(a: Matrix, tol: ToleranceContext | None = None, rr: RrefResult | None = None) -> RankNormalForm:
    # r0 = [I F; 0 0] P^T, so e2 stacks the nonzero RREF rows on unit rows at the free columns.
    rr = rr or rref(a, tol)
    n = a.ncols
    unit_rows = Matrix.identity(n, a.exact).select_rows(rr.free_cols)
    e2 = rr.nonzero_rows.vstack(unit_rows)
    return RankNormalForm(e1=rr.row_ops_inv, core_rank=rr.rank, e2=e2)


def prove_rank_equality_via_cr(
    a: Matrix, tol: ToleranceContext | None = None, check_oracle: bool = False
) -> RankReportEntry:
    """Row rank equals column rank, through ``A = C R``.

    The column rank is the number of pivot columns. The embedded ``I_r`` block
    gives ``R`` row rank ``r``; ``A = C R`` and ``R = (C^T C)^{-1} C^T A`` sandwich
    the row rank of ``A`` against it. The row rank of ``A`` is then measured
    independently by eliminating ``A^T``.
    """
    with stopwatch() as elapsed:
        rr = rref(a, tol)
        cr = cr_decompose(a, tol, rr)
        r = cr.rank
        checks = {}
        residuals = {}

        checks["c_is_pivot_columns"] = all(cr.c.col(k) == a.col(j) for k, j in enumerate(cr.pivot_cols))
        checks["r_pivot_block_is_identity"] = cr.r.select_columns(cr.pivot_cols) == Matrix.identity(r, a.exact)

        product = matmul(cr.c, cr.r)
        checks["a_equals_cr"] = factors_equal(product, a, tol=tol)

        # C has full column rank, so the unique X with C X = A is (C^T C)^{-1} C^T A:
        # a left multiple of A, which puts the rows of R inside the row space of A
        try:
            recovered = solve(cr.c, a, tol)
            checks["r_rows_in_row_space_of_a"] = factors_equal(recovered, cr.r, tol=tol)
        except (SingularMatrixError, InconsistentSystemError):
            recovered = None
            checks["r_rows_in_row_space_of_a"] = False

        row_rank = len(rref(transpose(a), tol).pivot_cols)
        if check_oracle and min(a.shape) <= ORACLE_MAX_DIM:
            checks["oracle_agrees"] = rank_oracle(a, tol) == r == row_rank
        if not a.exact:
            residuals["cr_reconstruction"] = relative_residual(product, a)
            if recovered is not None:
                residuals["r_from_a"] = relative_residual(recovered, cr.r)
    return RankReportEntry(
        route="cr", row_rank=row_rank, col_rank=r, checks=checks, residuals=residuals, timing_ms=elapsed[0]
    )
