"""Scalar regimes, the immutable dense ``Matrix``, permutations and the minor-based rank oracle.

Two scalar regimes are supported:

* exact: every entry is a :class:`fractions.Fraction`; all arithmetic is exact and
  "zero" means exactly zero.
* float: every entry is a Python ``float``; zero tests go through a
  :class:`ToleranceContext` scaled by the matrix's largest absolute entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Sequence

Scalar = Fraction | float

# Relative residual bound used when float-mode factor identities are verified.
RESIDUAL_RTOL = 1e-9

ORACLE_MAX_DIM = 8


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class RegimeError(TypeError):
    """Operands mix the exact and float scalar regimes."""


@dataclass(frozen=True)
class ToleranceContext:
    """Zero threshold for the float regime.

    With ``relative=True`` a value counts as zero when
    ``|x| <= zero_tol * max(1, scale)``, where ``scale`` is the largest absolute
    entry of the matrix being decomposed.
    """

    zero_tol: float = 1e-10
    relative: bool = True

    def __post_init__(self):
        if not self.zero_tol >= 0:
            raise ValueError(f"zero_tol must be nonnegative, got {self.zero_tol!r}")

    def threshold(self, scale: float = 1.0) -> float:
        if self.relative:
            return self.zero_tol * max(1.0, float(scale))
        return self.zero_tol


DEFAULT_TOL = ToleranceContext()


def _coerce(x, exact: bool) -> Scalar:
    if exact:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (Rational, str)):
            return Fraction(x)
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"non-finite entry {x!r}")
            return Fraction(x)
        raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")
    if isinstance(x, complex):
        raise TypeError("complex scalars are not supported")
    return float(x)


def _infer_exact(rows: Sequence[Sequence]) -> bool:
    for row in rows:
        for x in row:
            if isinstance(x, float):
                return False
            if not isinstance(x, Rational):
                raise TypeError(f"unsupported entry type {type(x).__name__}")
    return True


class Matrix:
    """Immutable dense ``m x n`` matrix over one scalar regime.

    >>> a = Matrix([[1, 2], [3, 4]])
    >>> a.exact, a.shape
    (True, (2, 2))
    >>> (a @ Matrix([[0], [1]])).to_lists()
    [[2], [4]]
    """

    __slots__ = ("_rows", "_shape", "_exact")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None, exact: bool | None = None):
        rows = [tuple(r) for r in rows]
        if ncols is None:
            if not rows:
                raise DimensionError("column count is ambiguous for a matrix with no rows; pass ncols")
            ncols = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise DimensionError(f"row {i} has {len(r)} entries, expected {ncols}")
        if exact is None:
            exact = _infer_exact(rows)
        object.__setattr__(self, "_rows", tuple(tuple(_coerce(x, exact) for x in r) for r in rows))
        object.__setattr__(self, "_shape", (len(rows), ncols))
        object.__setattr__(self, "_exact", bool(exact))

    @classmethod
    def _raw(cls, rows: tuple, ncols: int, exact: bool) -> Matrix:
        # Trusted constructor: rows already a tuple of tuples of coerced scalars.
        self = object.__new__(cls)
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_shape", (len(rows), ncols))
        object.__setattr__(self, "_exact", exact)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zeros(cls, m: int, n: int, exact: bool = True) -> Matrix:
        z = Fraction(0) if exact else 0.0
        return cls._raw(tuple((z,) * n for _ in range(m)), n, exact)

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> Matrix:
        z, o = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
        return cls._raw(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), n, exact)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int, exact: bool) -> Matrix:
        for c in columns:
            if len(c) != nrows:
                raise DimensionError(f"column of length {len(c)}, expected {nrows}")
        rows = tuple(tuple(_coerce(c[i], exact) for c in columns) for i in range(nrows))
        return cls._raw(rows, len(columns), exact)

    @classmethod
    def column(cls, values: Sequence, exact: bool | None = None) -> Matrix:
        return cls([[v] for v in values], ncols=1, exact=exact)

    @classmethod
    def diag(cls, values: Sequence, exact: bool) -> Matrix:
        n = len(values)
        z = Fraction(0) if exact else 0.0
        rows = tuple(
            tuple(_coerce(values[i], exact) if i == j else z for j in range(n)) for i in range(n)
        )
        return cls._raw(rows, n, exact)

    # -- basic accessors ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def nrows(self) -> int:
        return self._shape[0]

    @property
    def ncols(self) -> int:
        return self._shape[1]

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def regime(self) -> str:
        return "exact" if self._exact else "float"

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self._exact else 0.0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self._exact else 1.0

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def to_lists(self) -> list[list]:
        return [list(r) for r in self._rows]

    def __iter__(self):
        raise TypeError("iterate over Matrix.rows() or Matrix.columns() explicitly")

    @property
    def T(self) -> Matrix:
        return transpose(self)

    # -- slicing --------------------------------------------------------------

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> Matrix:
        rows = tuple(tuple(self._rows[i][j] for j in col_idx) for i in row_idx)
        return Matrix._raw(rows, len(col_idx), self._exact)

    def select_columns(self, col_idx: Sequence[int]) -> Matrix:
        return self.submatrix(range(self.nrows), col_idx)

    def select_rows(self, row_idx: Sequence[int]) -> Matrix:
        return self.submatrix(row_idx, range(self.ncols))

    def hstack(self, other: Matrix) -> Matrix:
        _check_regime(self, other)
        if self.nrows != other.nrows:
            raise DimensionError(f"hstack of {self.shape} and {other.shape}")
        rows = tuple(a + b for a, b in zip(self._rows, other._rows))
        return Matrix._raw(rows, self.ncols + other.ncols, self._exact)

    def vstack(self, other: Matrix) -> Matrix:
        _check_regime(self, other)
        if self.ncols != other.ncols:
            raise DimensionError(f"vstack of {self.shape} and {other.shape}")
        return Matrix._raw(self._rows + other._rows, self.ncols, self._exact)

    # -- arithmetic -----------------------------------------------------------

    def __matmul__(self, other: Matrix) -> Matrix:
        return matmul(self, other)

    def __add__(self, other: Matrix) -> Matrix:
        _check_same_shape(self, other)
        rows = tuple(tuple(x + y for x, y in zip(a, b)) for a, b in zip(self._rows, other._rows))
        return Matrix._raw(rows, self.ncols, self._exact)

    def __sub__(self, other: Matrix) -> Matrix:
        _check_same_shape(self, other)
        rows = tuple(tuple(x - y for x, y in zip(a, b)) for a, b in zip(self._rows, other._rows))
        return Matrix._raw(rows, self.ncols, self._exact)

    def __neg__(self) -> Matrix:
        return Matrix._raw(tuple(tuple(-x for x in r) for r in self._rows), self.ncols, self._exact)

    def scale(self, s) -> Matrix:
        s = _coerce(s, self._exact)
        return Matrix._raw(tuple(tuple(s * x for x in r) for r in self._rows), self.ncols, self._exact)

    # -- comparisons / conversions -------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._shape == other._shape and self._exact == other._exact and self._rows == other._rows

    def __hash__(self):
        return hash((self._shape, self._exact, self._rows))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"Matrix([{body}], shape={self._shape}, regime={self.regime!r})"

    def to_float(self) -> Matrix:
        if not self._exact:
            return self
        return Matrix._raw(tuple(tuple(float(x) for x in r) for r in self._rows), self.ncols, False)

    def to_exact(self) -> Matrix:
        if self._exact:
            return self
        return Matrix._raw(tuple(tuple(Fraction(x) for x in r) for r in self._rows), self.ncols, True)

    def max_abs(self) -> Scalar:
        return max((abs(x) for r in self._rows for x in r), default=self.zero)

    def is_zero(self, tol: ToleranceContext | None = None) -> bool:
        thresh = zero_threshold(self, tol)
        return all(abs(x) <= thresh for r in self._rows for x in r)


def _check_regime(a: Matrix, b: Matrix) -> None:
    if a.exact != b.exact:
        raise RegimeError(f"cannot combine {a.regime} and {b.regime} matrices")


def _check_same_shape(a: Matrix, b: Matrix) -> None:
    _check_regime(a, b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")


def zero_threshold(a: Matrix, tol: ToleranceContext | None = None) -> Scalar:
    """Largest magnitude treated as zero while decomposing ``a`` (0 in exact mode)."""
    if a.exact:
        return Fraction(0)
    return (tol or DEFAULT_TOL).threshold(float(a.max_abs()))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    _check_regime(a, b)
    if a.ncols != b.nrows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    zero = a.zero
    bcols = b.columns()
    rows = tuple(
        tuple(sum((x * y for x, y in zip(arow, bcol)), zero) for bcol in bcols) for arow in a.rows()
    )
    return Matrix._raw(rows, b.ncols, a.exact)


def transpose(a: Matrix) -> Matrix:
    return Matrix._raw(tuple(a.columns()), a.nrows, a.exact)


def dot(x: Sequence, y: Sequence):
    if len(x) != len(y):
        raise DimensionError(f"dot of lengths {len(x)} and {len(y)}")
    return sum((p * q for p, q in zip(x, y)), x[0] * 0 if x else 0)


def norm_fro(a: Matrix) -> Scalar:
    """Frobenius norm; in exact mode the *squared* norm as a Fraction (no square roots in Q)."""
    sq = sum((x * x for r in a.rows() for x in r), a.zero)
    return sq if a.exact else math.sqrt(sq)


def norm_fro_float(a: Matrix) -> float:
    """Frobenius norm as a float in either regime."""
    sq = norm_fro(a)
    return math.sqrt(sq) if a.exact else sq


def relative_residual(approx: Matrix, target: Matrix) -> float:
    """``||approx - target||_F / max(1, ||target||_F)`` as a float."""
    return norm_fro_float(approx - target) / max(1.0, norm_fro_float(target))


def factors_equal(
    approx: Matrix, target: Matrix, rtol: float = RESIDUAL_RTOL, tol: ToleranceContext | None = None
) -> bool:
    """Exact equality in exact mode, relative Frobenius residual bound in float mode.

    An explicit ``tol`` widens the bound to ``sqrt(m n) * tol.zero_tol``: entries
    the caller declared negligible may be dropped by the factorization.
    """
    if approx.shape != target.shape or approx.exact != target.exact:
        return False
    if approx.exact:
        return approx == target
    if tol is not None:
        rtol = max(rtol, math.sqrt(target.nrows * target.ncols) * tol.zero_tol)
    return relative_residual(approx, target) <= rtol


class Permutation:
    """Bijection on ``{0, ..., n-1}``.

    ``perm.map[k]`` is the original index placed at position ``k``; so
    ``perm.apply_columns(A)`` equals ``A @ perm.as_matrix()``.
    """

    __slots__ = ("_map",)

    def __init__(self, mapping: Sequence[int]):
        mapping = tuple(int(i) for i in mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError(f"not a permutation: {mapping}")
        object.__setattr__(self, "_map", mapping)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @property
    def map(self) -> tuple[int, ...]:
        return self._map

    @property
    def size(self) -> int:
        return len(self._map)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self._map == other._map

    def __hash__(self):
        return hash(self._map)

    def __repr__(self):
        return f"Permutation({list(self._map)})"

    def inverse(self) -> Permutation:
        inv = [0] * len(self._map)
        for k, i in enumerate(self._map):
            inv[i] = k
        return Permutation(inv)

    def apply(self, seq: Sequence) -> tuple:
        return tuple(seq[i] for i in self._map)

    def apply_columns(self, a: Matrix) -> Matrix:
        return a.select_columns(self._map)

    def apply_rows(self, a: Matrix) -> Matrix:
        """``P^T @ a``: row ``k`` of the result is row ``map[k]`` of ``a``."""
        return a.select_rows(self._map)

    def as_matrix(self, exact: bool = True) -> Matrix:
        n = len(self._map)
        z, o = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
        rows = [[z] * n for _ in range(n)]
        for k, i in enumerate(self._map):
            rows[i][k] = o
        return Matrix._raw(tuple(tuple(r) for r in rows), n, exact)


# -- rank oracle ---------------------------------------------------------------


def _row_minors(rows: Sequence[Sequence], ncols: int, k: int) -> dict[int, Scalar]:
    """Determinants of every ``k x k`` minor over the first ``k`` of ``rows``.

    Cofactor expansion along the last row, memoised over column subsets
    (bitmasks), so each minor of size ``t`` is built from minors of size ``t-1``.
    """
    level: dict[int, Scalar] = {0: 1}
    for t in range(1, k + 1):
        row = rows[t - 1]
        nxt: dict[int, Scalar] = {}
        for mask, sub in level.items():
            if sub == 0:
                continue
            for c in range(ncols):
                bit = 1 << c
                if mask & bit or row[c] == 0:
                    continue
                # number of chosen columns greater than c decides the cofactor sign
                above = bin(mask >> (c + 1)).count("1")
                term = row[c] * sub
                new = mask | bit
                nxt[new] = nxt.get(new, 0) + (term if above % 2 == 0 else -term)
        level = nxt
    return level


def _integerize(a: Matrix) -> list[list[int]]:
    # Scaling each row by its denominators' lcm leaves every minor's zero-ness unchanged.
    out = []
    for r in a.rows():
        lcm = 1
        for x in r:
            lcm = math.lcm(lcm, x.denominator)
        out.append([int(x * lcm) for x in r])
    return out


def minor_determinant(a: Matrix, row_idx: Sequence[int], col_idx: Sequence[int]) -> Scalar:
    """Determinant of ``a[row_idx, col_idx]`` by cofactor expansion (exact in exact mode)."""
    if len(row_idx) != len(col_idx):
        raise DimensionError("minor must be square")
    sub = a.submatrix(row_idx, col_idx)
    k = len(col_idx)
    minors = _row_minors(sub.rows(), k, k)
    det = minors.get((1 << k) - 1, 0)
    return Fraction(det) if a.exact else float(det)


def rank_oracle(a: Matrix, tol: ToleranceContext | None = None) -> int:
    """Largest ``k`` such that some ``k x k`` minor of ``a`` is nonzero.

    Brute-force enumeration of row subsets with memoised cofactor expansion over
    column subsets. Guarded to ``min(m, n) <= 8``. Exact matrices are first
    scaled row-wise to integers so the enumeration runs over Python ints.
    """
    m, n = a.shape
    if min(m, n) > ORACLE_MAX_DIM:
        raise ValueError(f"rank_oracle is limited to min(m, n) <= {ORACLE_MAX_DIM}, got {a.shape}")
    if m == 0 or n == 0:
        return 0
    if n > m:
        a = transpose(a)
        m, n = n, m
    if a.exact:
        rows = _integerize(a)
        nonzero = lambda d: d != 0  # noqa: E731
    else:
        rows = [list(r) for r in a.rows()]
        scale = max(1.0, float(a.max_abs()))
        eps = (tol or DEFAULT_TOL).zero_tol

        def nonzero(d, k):
            return abs(d) > eps * scale**k

    for k in range(n, 0, -1):
        for ridx in combinations(range(m), k):
            minors = _row_minors([rows[i] for i in ridx], n, k)
            if a.exact:
                if any(nonzero(d) for d in minors.values()):
                    return k
            elif any(nonzero(d, k) for d in minors.values()):
                return k
    return 0
