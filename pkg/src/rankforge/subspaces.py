"""The four fundamental subspaces, row-basis transport, and the row/null split of a vector."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import ORACLE_MAX_DIM, Matrix, ToleranceContext, matmul, rank_oracle, transpose
from .elimination import null_space_basis, rank, rref
from .orthogonalization import project_onto_subspace
from .report import RankReportEntry, stopwatch


class NotARowBasisError(ValueError):
    pass


@dataclass(frozen=True)
class SubspaceBases:
    """Bases of ``C(A)``, ``C(A^T)``, ``N(A)``, ``N(A^T)`` stored as matrix columns."""

    col_basis: Matrix
    row_basis: Matrix
    null_basis: Matrix
    left_null_basis: Matrix
    rank: int

    def check(self, a: Matrix, tol: ToleranceContext | None = None) -> dict[str, bool]:
        """Evaluate every structural property; all values are ``True`` for a correct result."""
        m, n = a.shape
        r = self.rank
        out = {
            "col_basis_full_rank": rank(self.col_basis, tol) == self.col_basis.ncols == r,
            "row_basis_full_rank": rank(self.row_basis, tol) == self.row_basis.ncols == r,
            "null_basis_full_rank": rank(self.null_basis, tol) == self.null_basis.ncols,
            "left_null_basis_full_rank": rank(self.left_null_basis, tol) == self.left_null_basis.ncols,
            "a_kills_null_basis": matmul(a, self.null_basis).is_zero(tol),
            "at_kills_left_null_basis": matmul(transpose(a), self.left_null_basis).is_zero(tol),
            "row_perp_null": matmul(transpose(self.row_basis), self.null_basis).is_zero(tol),
            "col_perp_left_null": matmul(transpose(self.col_basis), self.left_null_basis).is_zero(tol),
            "rank_nullity_n": r + self.null_basis.ncols == n,
            "rank_nullity_m": r + self.left_null_basis.ncols == m,
        }
        if a.exact:
            # the two orthogonality products are exactly zero, not merely small
            out["row_perp_null"] &= matmul(transpose(self.row_basis), self.null_basis).is_zero()
            out["col_perp_left_null"] &= matmul(transpose(self.col_basis), self.left_null_basis).is_zero()
        return out


def four_subspaces(a: Matrix, tol: ToleranceContext | None = None) -> SubspaceBases:
    rr = rref(a, tol)
    return SubspaceBases(
        col_basis=a.select_columns(rr.pivot_cols),
        row_basis=transpose(rr.nonzero_rows),
        null_basis=null_space_basis(a, tol, rr),
        left_null_basis=null_space_basis(transpose(a), tol),
        rank=rr.rank,
    )


def _in_span(v: Sequence, basis: Matrix, tol: ToleranceContext | None) -> bool:
    if basis.ncols == 0:
        return Matrix.column(list(v), exact=basis.exact).is_zero(tol) if v else True
    res = project_onto_subspace(v, basis, tol).residual
    return Matrix.column(list(res), exact=basis.exact).is_zero(tol)


def transport_row_basis(a: Matrix, row_basis: Matrix, tol: ToleranceContext | None = None) -> Matrix:
    """Map a row-space basis ``r_1..r_r`` to the column-space basis ``A r_1 .. A r_r``.

    The input must be a basis of ``C(A^T)``; the image is verified to have full
    column rank and to span ``C(A)``.
    """
    if row_basis.nrows != a.ncols:
        raise NotARowBasisError(f"row basis has {row_basis.nrows} rows, A has {a.ncols} columns")
    rr = rref(a, tol)
    r = rr.rank
    got = rank(row_basis, tol)
    if got != r or row_basis.ncols != r:
        raise NotARowBasisError(f"{row_basis.ncols} vectors of rank {got} cannot be a basis of a rank-{r} row space")
    span = transpose(rr.nonzero_rows)
    for j in range(row_basis.ncols):
        if not _in_span(row_basis.col(j), span, tol):
            raise NotARowBasisError(f"column {j} is not in the row space of A")

    image = matmul(a, row_basis)
    if rank(image, tol) != r:
        raise ArithmeticError("transported vectors are dependent")
    if rank(image.hstack(a.select_columns(rr.pivot_cols)), tol) != r:
        raise ArithmeticError("transported vectors do not span the column space")
    return image


def split_vector(a: Matrix, x: Sequence, tol: ToleranceContext | None = None) -> tuple[tuple, tuple]:
    """``x = x_r + x_n`` with ``x_r`` in the row space and ``x_n`` in the null space of ``a``."""
    x = Matrix.column(list(x), exact=a.exact).col(0) if len(x) else ()
    if len(x) != a.ncols:
        raise ValueError(f"vector of length {len(x)} for a matrix with {a.ncols} columns")
    rr = rref(a, tol)
    if rr.rank == 0:
        return tuple(a.zero for _ in x), tuple(x)
    p = project_onto_subspace(x, transpose(rr.nonzero_rows), tol)
    x_r, x_n = p.projection, p.residual
    if not matmul(a, Matrix.column(x_n, exact=a.exact)).is_zero(tol):
        raise ArithmeticError("null-space component is not annihilated by A")
    return x_r, x_n


def _transport_proof_step(a: Matrix, tol: ToleranceContext | None) -> tuple[int, int]:
    """Row rank of ``a`` and the number of independent columns exhibited by transport."""
    rr = rref(a, tol)
    row_basis = transpose(rr.nonzero_rows)
    image = matmul(a, row_basis)
    return rr.rank, rank(image, tol)


def prove_rank_equality_elementary(
    a: Matrix, tol: ToleranceContext | None = None, check_oracle: bool = False
) -> RankReportEntry:
    """Row rank equals column rank, by transporting row bases.

    ``r`` independent rows give ``r`` independent columns ``A r_i``, so row rank
    <= column rank; doing the same for ``A^T`` gives the reverse inequality.
    """
    with stopwatch() as elapsed:
        row_rank, exhibited_cols = _transport_proof_step(a, tol)
        col_rank, exhibited_rows = _transport_proof_step(transpose(a), tol)
        s = four_subspaces(a, tol)
        checks = {
            "row_rank_le_col_rank": exhibited_cols == row_rank,
            "col_rank_le_row_rank": exhibited_rows == col_rank,
            "row_space_perp_null_space": matmul(transpose(s.row_basis), s.null_basis).is_zero(tol),
            "rank_nullity": row_rank + s.null_basis.ncols == a.ncols,
        }
        if check_oracle and min(a.shape) <= ORACLE_MAX_DIM:
            checks["oracle_agrees"] = rank_oracle(a, tol) == row_rank
    return RankReportEntry(
        route="elementary", row_rank=row_rank, col_rank=col_rank, checks=checks, timing_ms=elapsed[0]
    )
