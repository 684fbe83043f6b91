"""ULV / URV factorizations, rank decompositions ``A = D F`` and the map between two of them."""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    ORACLE_MAX_DIM,
    DimensionError,
    Matrix,
    Permutation,
    ToleranceContext,
    factors_equal,
    matmul,
    rank_oracle,
    relative_residual,
    transpose,
    zero_threshold,
)
from .elimination import SingularMatrixError, inverse, rank, rref, solve
from .orthogonalization import lq, qr
from .report import RankReportEntry, stopwatch


class RankDecompositionMismatch(ValueError):
    """The factor pairs are not rank decompositions of one matrix."""


@dataclass(frozen=True)
class UTVFactors:
    """``A == u @ t @ v`` where ``t`` holds an ``r x r`` triangular core and zeros elsewhere.

    ``u.T @ u == diag(u_sq_norms)`` and ``v @ v.T == diag(v_sq_norms)``; both
    diagonals are all ones in float mode. ``permutation`` is the column (ULV) or
    row (URV) permutation that moved the independent columns or rows first.
    """

    u: Matrix
    t: Matrix
    v: Matrix
    rank: int
    shape: str
    reduced_u: Matrix
    reduced_v: Matrix
    u_sq_norms: tuple
    v_sq_norms: tuple
    permutation: Permutation

    @property
    def core(self) -> Matrix:
        r = self.rank
        return self.t.submatrix(range(r), range(r))

    def reconstruct(self) -> Matrix:
        return matmul(self.u, matmul(self.t, self.v))

    def reconstruct_reduced(self) -> Matrix:
        return matmul(self.reduced_u, matmul(self.core, self.reduced_v))


def _embed(core: Matrix, m: int, n: int) -> Matrix:
    r = core.nrows
    z = core.zero
    rows = tuple(
        tuple(core[i, j] if i < r and j < r else z for j in range(n)) for i in range(m)
    )
    return Matrix._raw(rows, n, core.exact)


def _combination_coefficients(z: Matrix, rest: Matrix, tol: ToleranceContext | None) -> Matrix:
    """``E`` with ``z @ E == rest``, by exact elimination."""
    if z.ncols == 0 or rest.ncols == 0:
        return Matrix.zeros(z.ncols, rest.ncols, z.exact)
    return solve(z, rest, tol)


def ulv(a: Matrix, tol: ToleranceContext | None = None) -> UTVFactors:
    """``A = U [[L, 0], [0, 0]] V`` with ``L`` lower triangular of size column-rank(A).

    1. Permute the RREF pivot columns to the front: ``A P = [Z, Z E]``.
    2. Express the remaining columns as ``Z E`` (exact mode solves for ``E``).
    3. Full QR of ``Z``: ``Z = U [W; 0]``.
    4. Full LQ of ``[W, W E] = [L, 0] V0``; then ``V = V0 P^T``.
    """
    m, n = a.shape
    rr = rref(a, tol)
    r = rr.rank
    perm = Permutation(rr.pivot_cols + rr.free_cols)
    z = a.select_columns(rr.pivot_cols)
    zqr = qr(z, "full", tol)
    w = zqr.r.submatrix(range(r), range(r))
    if a.exact:
        e = _combination_coefficients(z, a.select_columns(rr.free_cols), tol)
        top = w.hstack(matmul(w, e))
    else:
        # W E is the leading block of U^T A[:, free]; this avoids the squared
        # conditioning of solving for E through normal equations
        rest = matmul(transpose(zqr.q.select_columns(range(r))), a.select_columns(rr.free_cols))
        top = w.hstack(rest)
    tlq = lq(top, "full", tol)
    core = tlq.l.submatrix(range(r), range(r))

    u = zqr.q
    v = perm.inverse().apply_columns(tlq.q)
    return UTVFactors(
        u=u,
        t=_embed(core, m, n),
        v=v,
        rank=r,
        shape="lower",
        reduced_u=u.select_columns(range(r)),
        reduced_v=v.select_rows(range(r)),
        u_sq_norms=zqr.sq_norms,
        v_sq_norms=tlq.sq_norms,
        permutation=perm,
    )


def urv(a: Matrix, tol: ToleranceContext | None = None) -> UTVFactors:
    """``A = U [[R, 0], [0, 0]] V`` with ``R`` upper triangular: the transposed ULV of ``A.T``."""
    f = ulv(transpose(a), tol)
    return UTVFactors(
        u=transpose(f.v),
        t=transpose(f.t),
        v=transpose(f.u),
        rank=f.rank,
        shape="upper",
        reduced_u=transpose(f.reduced_v),
        reduced_v=transpose(f.reduced_u),
        u_sq_norms=f.v_sq_norms,
        v_sq_norms=f.u_sq_norms,
        permutation=f.permutation,
    )


@dataclass(frozen=True)
class RankDecompFactors:
    d: Matrix
    f: Matrix
    split: str

    @property
    def rank(self) -> int:
        return self.d.ncols

    @property
    def storage(self) -> int:
        return self.rank * (self.d.nrows + self.f.ncols)


SPLITS = ("DL_F", "D_LF")


def rank_decompose(a: Matrix, tol: ToleranceContext | None = None, split: str = "DL_F") -> RankDecompFactors:
    """``A = D F`` from the reduced ULV ``A = U0 L V0``.

    ``split="DL_F"`` gives ``D = U0 L, F = V0``; ``split="D_LF"`` gives ``D = U0, F = L V0``.
    """
    if split not in SPLITS:
        raise ValueError(f"split must be one of {SPLITS}, got {split!r}")
    f = ulv(a, tol)
    if split == "DL_F":
        return RankDecompFactors(matmul(f.reduced_u, f.core), f.reduced_v, split)
    return RankDecompFactors(f.reduced_u, matmul(f.core, f.reduced_v), split)


def connect_rank_decompositions(
    d1: Matrix, f1: Matrix, d2: Matrix, f2: Matrix, tol: ToleranceContext | None = None
) -> Matrix:
    """Nonsingular ``P = F2 F1^T (F1 F1^T)^{-1}`` with ``D1 == D2 P`` and ``F1 == P^{-1} F2``."""
    r = d1.ncols
    if not (f1.nrows == d2.ncols == f2.nrows == r and d1.nrows == d2.nrows and f1.ncols == f2.ncols):
        raise DimensionError(
            f"incompatible factor shapes {d1.shape}, {f1.shape}, {d2.shape}, {f2.shape}"
        )
    if not factors_equal(matmul(d1, f1), matmul(d2, f2), tol=tol):
        raise RankDecompositionMismatch("D1 F1 and D2 F2 are different matrices")
    for name, m in (("D1", d1), ("D2", d2), ("F2^T", transpose(f2))):
        got = rank(m, tol)
        if got != r:
            raise RankDecompositionMismatch(f"{name} has rank {got}, expected full rank {r}")

    try:
        gram_inv = inverse(matmul(f1, transpose(f1)), tol)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"F1 F1^T is singular, so F1 is rank deficient ({exc})") from None
    p = matmul(matmul(f2, transpose(f1)), gram_inv)

    if not factors_equal(matmul(d2, p), d1, tol=tol):
        raise RankDecompositionMismatch("D1 != D2 P")
    if not factors_equal(matmul(inverse(p, tol), f2), f1, tol=tol):
        raise RankDecompositionMismatch("F1 != P^{-1} F2")
    return p


def prove_rank_equality_via_ulv(
    a: Matrix, tol: ToleranceContext | None = None, check_oracle: bool = False
) -> RankReportEntry:
    """Row rank equals column rank, through ``D = U^T A V^T``.

    ``D`` carries the nonsingular triangular core in its leading block and zeros
    elsewhere, so its row and column ranks are visibly equal. Multiplying by
    the orthogonal factors must then leave both ranks of ``A`` unchanged; that
    is checked by independent eliminations of ``A``, ``U^T A`` and ``U^T A V^T``
    and of their transposes.
    """
    with stopwatch() as elapsed:
        f = ulv(a, tol)
        r = f.rank
        checks, residuals = {}, {}
        recon = f.reconstruct()
        checks["a_equals_utv"] = factors_equal(recon, a, tol=tol)
        checks["a_equals_reduced_utv"] = factors_equal(f.reconstruct_reduced(), a, tol=tol)

        ua = matmul(transpose(f.u), a)
        d = matmul(ua, transpose(f.v))
        scaled = matmul(matmul(Matrix.diag(f.u_sq_norms, a.exact), f.t), Matrix.diag(f.v_sq_norms, a.exact))
        checks["d_is_scaled_core"] = factors_equal(d, scaled, tol=tol)

        core = f.core
        thresh = zero_threshold(core, tol)
        checks["core_diagonal_nonzero"] = all(abs(core[i, i]) > thresh for i in range(r))
        checks["core_lower_triangular"] = all(core[i, j] == 0 for i in range(r) for j in range(i + 1, r))

        col_ranks = [rank(x, tol) for x in (a, ua, d)]
        row_ranks = [rank(transpose(x), tol) for x in (a, ua, d)]
        checks["column_rank_preserved"] = col_ranks == [r] * 3
        checks["row_rank_preserved"] = len(set(row_ranks)) == 1
        if check_oracle and min(a.shape) <= ORACLE_MAX_DIM:
            checks["oracle_agrees"] = rank_oracle(a, tol) == r
        if not a.exact:
            residuals["utv_reconstruction"] = relative_residual(recon, a)
            residuals["d_vs_core"] = relative_residual(d, scaled)
    return RankReportEntry(
        route="ulv",
        row_rank=row_ranks[2],
        col_rank=r,
        checks=checks,
        residuals=residuals,
        timing_ms=elapsed[0],
    )
