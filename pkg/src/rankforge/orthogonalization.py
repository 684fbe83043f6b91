"""Projections, classical Gram-Schmidt, and QR / LQ built on it.

Exact mode never takes square roots. Orthogonal factors are returned with
mutually orthogonal but unnormalized columns ``b_i``, together with their
squared lengths ``d_i = b_i^T b_i``; the triangular factor is expressed against
those ``b_i`` so that every identity (``A == Q R``, ``Q^T Q == diag(d)``) holds
over the rationals. The orthonormal factors are ``b_i / sqrt(d_i)`` and
``sqrt(d_i) * R[i, :]``; :meth:`QRFactors.normalize` produces them whenever
every ``d_i`` is a rational square, and :meth:`QRFactors.q_display` renders
them symbolically otherwise.

Float mode normalizes as usual and runs one re-orthogonalization pass per vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    DimensionError,
    Matrix,
    RegimeError,
    ToleranceContext,
    dot,
    transpose,
    zero_threshold,
)
from .elimination import rank, solve


class DependentBasisError(ValueError):
    def __init__(self, rank: int, ncols: int):
        super().__init__(f"basis columns are dependent: rank {rank} < {ncols} columns")
        self.rank = rank
        self.ncols = ncols


def _vector(values: Sequence) -> tuple:
    return Matrix.column(list(values)).col(0) if len(values) else ()


def _same_regime(*vectors: tuple) -> bool:
    kinds = {isinstance(x, Fraction) for v in vectors for x in v}
    if len(kinds) > 1:
        raise RegimeError("vectors mix exact and float entries")
    return kinds != {False}


def _axpy(alpha, x: Sequence, y: Sequence) -> list:
    return [alpha * p + q for p, q in zip(x, y)]


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or ``None`` if it is irrational."""
    if x < 0:
        raise ValueError("negative input")
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if p * p == x.numerator and q * q == x.denominator:
        return Fraction(p, q)
    return None


@dataclass(frozen=True)
class ProjectionResult:
    """``projection == sum(coefficients[i] * b_i)`` and ``residual == a - projection``."""

    coefficients: tuple
    projection: tuple
    residual: tuple

    @property
    def coefficient(self):
        if len(self.coefficients) != 1:
            raise ValueError("projection onto a subspace has several coefficients")
        return self.coefficients[0]


def project_onto_vector(a: Sequence, b: Sequence) -> ProjectionResult:
    """Project ``a`` onto the line through ``b``: ``x = a.b / b.b``."""
    a, b = _vector(a), _vector(b)
    _same_regime(a, b)
    if len(a) != len(b):
        raise DimensionError(f"vectors of length {len(a)} and {len(b)}")
    bb = dot(b, b)
    if bb == 0:
        raise ValueError("cannot project onto the zero vector")
    x = dot(a, b) / bb
    proj = tuple(x * t for t in b)
    return ProjectionResult((x,), proj, tuple(p - q for p, q in zip(a, proj)))


def project_onto_subspace(
    a: Sequence, basis: Matrix, tol: ToleranceContext | None = None
) -> ProjectionResult:
    """Project ``a`` onto ``C(basis)`` by solving the normal equations ``B^T B x = B^T a``."""
    a = _vector(a)
    if len(a) != basis.nrows:
        raise DimensionError(f"vector of length {len(a)} against basis with {basis.nrows} rows")
    if a and _same_regime(a) != basis.exact:
        raise RegimeError("vector and basis use different scalar regimes")
    r = rank(basis, tol)
    if r < basis.ncols:
        raise DependentBasisError(r, basis.ncols)
    bt = transpose(basis)
    x = solve(bt @ basis, bt @ Matrix.column(a, exact=basis.exact), tol).col(0)
    proj = (basis @ Matrix.column(x, exact=basis.exact)).col(0)
    return ProjectionResult(tuple(x), proj, tuple(p - q for p, q in zip(a, proj)))


# -- Gram-Schmidt --------------------------------------------------------------


def _orthogonalize(v: Sequence, basis: list, sq_norms: list, exact: bool) -> tuple[list, list]:
    """Coefficients of ``v`` on ``basis`` and the part of ``v`` orthogonal to it.

    Classical Gram-Schmidt: all coefficients are taken against the original ``v``.
    Float mode repeats the sweep once on the residual.
    """
    if exact:
        coeffs = [dot(b, v) / d for b, d in zip(basis, sq_norms)]
        w = list(v)
        for c, b in zip(coeffs, basis):
            if c:
                w = _axpy(-c, b, w)
        return coeffs, w
    coeffs = [0.0] * len(basis)
    w = list(v)
    for _ in range(2):
        step = [dot(q, w) for q in basis]
        for k, (c, q) in enumerate(zip(step, basis)):
            w = _axpy(-c, q, w)
            coeffs[k] += c
    return coeffs, w


def _is_dependent(w: Sequence, thresh, exact: bool) -> bool:
    if exact:
        return not any(w)
    return math.sqrt(dot(w, w)) <= thresh


def _accept(w: list, exact: bool) -> tuple[list, object]:
    """Turn a residual into a basis vector; returns the vector and its squared length."""
    if exact:
        return w, dot(w, w)
    nrm = math.sqrt(dot(w, w))
    return [t / nrm for t in w], nrm


def _complete_basis(basis: list, sq_norms: list, m: int, target: int, exact: bool) -> None:
    """Append orthogonalized canonical vectors ``e_0, e_1, ...`` until ``target`` vectors exist.

    Float mode only accepts ``e_j`` whose residual has norm at least ``1/(2 sqrt(m))``;
    one always exists because the residual norms squared sum to ``m - len(basis)``.
    """
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    floor = 0.5 / math.sqrt(m) if m else 0.0
    while len(basis) < target:
        for j in range(m):
            e = [zero] * m
            e[j] = one
            _, w = _orthogonalize(e, basis, sq_norms, exact)
            if exact:
                if any(w):
                    break
            elif math.sqrt(dot(w, w)) >= floor:
                break
        else:  # pragma: no cover - unreachable while len(basis) < m
            raise RuntimeError("failed to complete orthogonal basis")
        b, d = _accept(w, exact)
        basis.append(b)
        sq_norms.append(d if exact else one)


@dataclass(frozen=True)
class GramSchmidtResult:
    """``columns == basis @ coefficients`` with ``basis`` spanning the kept columns' prefixes.

    In exact mode ``basis`` is orthogonal with squared lengths ``sq_norms`` and the
    kept-column coefficients are 1; in float mode it is orthonormal.
    """

    basis: Matrix
    coefficients: Matrix
    kept: tuple[int, ...]
    sq_norms: tuple

    @property
    def dependent(self) -> tuple[int, ...]:
        kept = set(self.kept)
        return tuple(j for j in range(self.coefficients.ncols) if j not in kept)


def gram_schmidt(columns: Matrix, tol: ToleranceContext | None = None) -> GramSchmidtResult:
    m, n = columns.shape
    exact = columns.exact
    thresh = zero_threshold(columns, tol)
    basis, sq_norms, coeff_cols, kept = [], [], [], []
    for j in range(n):
        coeffs, w = _orthogonalize(columns.col(j), basis, sq_norms, exact)
        if not _is_dependent(w, thresh, exact):
            b, d = _accept(w, exact)
            basis.append(b)
            sq_norms.append(d if exact else 1.0)
            coeffs.append(Fraction(1) if exact else d)
            kept.append(j)
        coeff_cols.append(coeffs)
    k = len(basis)
    zero = columns.zero
    coefficients = Matrix.from_columns([c + [zero] * (k - len(c)) for c in coeff_cols], k, exact)
    return GramSchmidtResult(
        basis=Matrix.from_columns(basis, m, exact),
        coefficients=coefficients,
        kept=tuple(kept),
        sq_norms=tuple(sq_norms),
    )


# -- QR / LQ -------------------------------------------------------------------


@dataclass(frozen=True)
class QRFactors:
    """``A == q @ r`` with ``r`` upper triangular.

    ``q.T @ q == diag(sq_norms)``; all ones when ``normalized``. ``dependent``
    lists the input columns whose ``r`` diagonal entry is a structural zero.
    """

    q: Matrix
    r: Matrix
    mode: str
    sq_norms: tuple
    dependent: tuple[int, ...] = ()

    @property
    def normalized(self) -> bool:
        return all(d == 1 for d in self.sq_norms)

    def normalize(self) -> QRFactors:
        """Orthonormal ``Q`` and matching ``R`` with rational entries.

        Raises ``ValueError`` when some squared length has an irrational root;
        use :meth:`q_display` or :meth:`to_float` instead.
        """
        if not self.q.exact or self.normalized:
            return self
        roots = [rational_sqrt(d) for d in self.sq_norms]
        if any(s is None for s in roots):
            raise ValueError("Q needs irrational square roots; see q_display() or to_float()")
        return self._rescaled(roots)

    def _rescaled(self, roots: list) -> QRFactors:
        q = Matrix.from_columns([[x / s for x in self.q.col(j)] for j, s in enumerate(roots)], self.q.nrows, self.q.exact)
        rows = [[s * x for x in self.r.row(i)] for i, s in enumerate(roots)]
        rows += [list(self.r.row(i)) for i in range(len(roots), self.r.nrows)]
        r = Matrix(rows, ncols=self.r.ncols, exact=self.r.exact)
        one = Fraction(1) if self.q.exact else 1.0
        return QRFactors(q, r, self.mode, (one,) * len(roots), self.dependent)

    def to_float(self) -> QRFactors:
        if not self.q.exact:
            return self
        f = QRFactors(self.q.to_float(), self.r.to_float(), self.mode, tuple(float(d) for d in self.sq_norms), self.dependent)
        return f._rescaled([math.sqrt(d) for d in f.sq_norms])

    def q_display(self) -> list[list[str]]:
        """Entries of the orthonormal ``Q`` as ``c*sqrt(d)`` strings over the rationals."""
        out = []
        for i in range(self.q.nrows):
            row = []
            for j, d in enumerate(self.sq_norms):
                c = self.q[i, j] / d if self.q.exact else self.q[i, j]
                if c == 0 or d == 1:
                    row.append(str(c))
                else:
                    row.append(f"{c}*sqrt({d})")
            out.append(row)
        return out


def _qr_core(a: Matrix, full: bool, tol: ToleranceContext | None) -> QRFactors:
    m, n = a.shape
    exact = a.exact
    zero = a.zero
    thresh = zero_threshold(a, tol)
    basis, sq_norms, r_cols, dependent = [], [], [], []
    for j in range(n):
        coeffs, w = _orthogonalize(a.col(j), basis, sq_norms, exact)
        if _is_dependent(w, thresh, exact):
            # structural zero on the diagonal; the slot gets a filler orthogonal to everything so far
            dependent.append(j)
            coeffs.append(zero)
            _complete_basis(basis, sq_norms, m, len(basis) + 1, exact)
        else:
            b, d = _accept(w, exact)
            basis.append(b)
            sq_norms.append(d if exact else 1.0)
            coeffs.append(Fraction(1) if exact else d)
        r_cols.append(coeffs)
    k = m if full else n
    if full:
        _complete_basis(basis, sq_norms, m, m, exact)
    r = Matrix.from_columns([c + [zero] * (k - len(c)) for c in r_cols], k, exact)
    q = Matrix.from_columns(basis, m, exact)
    return QRFactors(q, r, "full" if full else "reduced", tuple(sq_norms), tuple(dependent))


def _check_mode(mode: str) -> bool:
    if mode not in ("reduced", "full"):
        raise ValueError(f"mode must be 'reduced' or 'full', got {mode!r}")
    return mode == "full"


def qr(a: Matrix, mode: str = "reduced", tol: ToleranceContext | None = None) -> QRFactors:
    """QR factorization of a tall matrix by classical Gram-Schmidt.

    Full mode appends silent columns to ``q`` (canonical vectors pushed through
    the same Gram-Schmidt sweep) and silent zero rows to ``r``. Dependent
    columns are accepted: they get a zero diagonal in ``r`` and are listed in
    ``dependent``.
    """
    full = _check_mode(mode)
    if a.nrows < a.ncols:
        raise DimensionError(f"qr needs m >= n, got {a.shape}; use lq for wide matrices")
    return _qr_core(a, full, tol)


@dataclass(frozen=True)
class LQFactors:
    """``A == l @ q`` with ``l`` lower triangular and ``q @ q.T == diag(sq_norms)``."""

    l: Matrix  # noqa: E741
    q: Matrix
    mode: str
    sq_norms: tuple
    dependent: tuple[int, ...] = ()

    @property
    def normalized(self) -> bool:
        return all(d == 1 for d in self.sq_norms)

    def as_qr_of_transpose(self) -> QRFactors:
        return QRFactors(transpose(self.q), transpose(self.l), self.mode, self.sq_norms, self.dependent)

    def normalize(self) -> LQFactors:
        return lq_from_qr(self.as_qr_of_transpose().normalize())

    def to_float(self) -> LQFactors:
        return lq_from_qr(self.as_qr_of_transpose().to_float())


def lq_from_qr(f: QRFactors) -> LQFactors:
    return LQFactors(transpose(f.r), transpose(f.q), f.mode, f.sq_norms, f.dependent)


def lq(a: Matrix, mode: str = "reduced", tol: ToleranceContext | None = None) -> LQFactors:
    """LQ factorization of a wide matrix: the transposed QR factors of ``a.T``."""
    _check_mode(mode)
    if a.ncols < a.nrows:
        raise DimensionError(f"lq needs n >= m, got {a.shape}; use qr for tall matrices")
    return lq_from_qr(qr(transpose(a), mode, tol))
