"""Skeleton (CUR) factorization ``A = C U^{-1} R`` from actual rows and columns of ``A``."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .core import Matrix, ToleranceContext, factors_equal, matmul, minor_determinant, transpose
from .elimination import SingularMatrixError, inverse, rank, rref


class SelectionError(ValueError):
    """Row or column indices that do not meet the intersection preconditions."""


def select_independent_columns(a: Matrix, tol: ToleranceContext | None = None) -> tuple[int, ...]:
    """First-independent columns scanning left to right (the RREF pivot columns)."""
    return rref(a, tol).pivot_cols


def select_independent_rows(n: Matrix, tol: ToleranceContext | None = None) -> tuple[int, ...]:
    """First-independent rows scanning top to bottom (pivot columns of ``n.T``)."""
    return rref(transpose(n), tol).pivot_cols


@dataclass(frozen=True)
class CURFactors:
    c: Matrix
    u: Matrix
    r: Matrix
    row_idx: tuple[int, ...]
    col_idx: tuple[int, ...]
    u_inv: Matrix

    @property
    def rank(self) -> int:
        return len(self.col_idx)

    def reconstruct(self) -> Matrix:
        return matmul(self.c, matmul(self.u_inv, self.r))


def cur_decompose(a: Matrix, tol: ToleranceContext | None = None) -> CURFactors:
    """Pick independent columns ``J``, then independent rows ``I`` of ``N = A[:, J]``.

    ``U = A[I, J]`` is nonsingular by construction. In exact mode every column
    identity ``a_i == C U^{-1} r_i`` is checked before returning.
    """
    m, n = a.shape
    cols = select_independent_columns(a, tol)
    c = a.select_columns(cols)
    rows = select_independent_rows(c, tol)
    u = a.submatrix(rows, cols)
    r = a.select_rows(rows)
    u_inv = inverse(u, tol)
    if a.exact:
        coupling = matmul(c, u_inv)
        for i in range(n):
            r_i = Matrix.column(r.col(i), exact=True)
            if matmul(coupling, r_i).col(0) != a.col(i):
                raise ArithmeticError(f"column {i} is not reproduced by C U^-1 r_i")
    return CURFactors(c=c, u=u, r=r, row_idx=rows, col_idx=cols, u_inv=u_inv)


@dataclass(frozen=True)
class IntersectionCheck:
    invertible: bool
    u: Matrix
    u_inv: Matrix | None


def check_intersection_invertible(
    a: Matrix, row_idx: Sequence[int], col_idx: Sequence[int], tol: ToleranceContext | None = None
) -> IntersectionCheck:
    """Validate a user-supplied selection and invert ``A[I, J]``.

    Raises :class:`SelectionError` naming the failed rank check when ``|I|``,
    ``|J|`` differ from ``rank(A)``, or ``A[:, J]`` / ``A[I, :]`` is rank
    deficient. When the checks pass, the intersection is expected to be
    invertible; ``invertible=False`` would point at a bug, not a valid outcome.
    """
    row_idx, col_idx = tuple(row_idx), tuple(col_idx)
    r = rank(a, tol)
    if len(row_idx) != r or len(col_idx) != r:
        raise SelectionError(f"|I|={len(row_idx)} and |J|={len(col_idx)} must both equal rank(A)={r}")
    col_rank = rank(a.select_columns(col_idx), tol)
    if col_rank != r:
        raise SelectionError(f"A[:, J] has column rank {col_rank}, expected {r}")
    row_rank = rank(transpose(a.select_rows(row_idx)), tol)
    if row_rank != r:
        raise SelectionError(f"A[I, :] has row rank {row_rank}, expected {r}")
    u = a.submatrix(row_idx, col_idx)
    try:
        return IntersectionCheck(True, u, inverse(u, tol))
    except SingularMatrixError:
        return IntersectionCheck(False, u, None)


def intersection_sweep(a: Matrix, tol: ToleranceContext | None = None) -> tuple[int, int]:
    """Check every admissible ``(I, J)`` of ``a`` by exact minor determinant.

    Returns ``(admissible_pairs, invertible_pairs)``; the two agree whenever every
    intersection of ``r`` independent rows with ``r`` independent columns is
    nonsingular.
    """
    m, n = a.shape
    r = rank(a, tol)
    good_rows = [I for I in combinations(range(m), r) if rank(transpose(a.select_rows(I)), tol) == r]
    good_cols = [J for J in combinations(range(n), r) if rank(a.select_columns(J), tol) == r]
    admissible = invertible = 0
    for I in good_rows:
        for J in good_cols:
            admissible += 1
            if minor_determinant(a, I, J) != 0:
                invertible += 1
    return admissible, invertible


def cur_matches(a: Matrix, f: CURFactors, tol: ToleranceContext | None = None) -> bool:
    """``C``, ``R`` are verbatim slices of ``A``, ``U`` is their intersection, and ``C U^{-1} R == A``."""
    return (
        f.c == a.select_columns(f.col_idx)
        and f.r == a.select_rows(f.row_idx)
        and f.u == a.submatrix(f.row_idx, f.col_idx)
        and factors_equal(f.reconstruct(), a, tol=tol)
    )
