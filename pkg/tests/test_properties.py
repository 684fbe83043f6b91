from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from rankforge import (
    Matrix,
    cr_decompose,
    four_subspaces,
    matmul,
    qr,
    rank_oracle,
    rref,
    transpose,
    ulv,
    urv,
)
from rankforge.elimination import rank
from rankforge.mmio import format_csv, format_matrix_market, parse_csv_text, parse_matrix_market_text
from rankforge.skeleton import cur_decompose

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

entries = st.integers(-9, 9)


@st.composite
def matrices(draw, max_dim=6, min_dim=1):
    m = draw(st.integers(min_dim, max_dim))
    n = draw(st.integers(min_dim, max_dim))
    return Matrix(draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=m, max_size=m)), ncols=n)


@st.composite
def low_rank(draw, max_dim=6):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    k = draw(st.integers(0, min(m, n)))
    left = Matrix(draw(st.lists(st.lists(entries, min_size=k, max_size=k), min_size=m, max_size=m)), ncols=k)
    right = Matrix(draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=k, max_size=k)), ncols=n)
    return left @ right


@st.composite
def chain(draw):
    dims = draw(st.lists(st.integers(1, 4), min_size=4, max_size=4))
    mats = []
    for r, c in zip(dims, dims[1:]):
        mats.append(Matrix(draw(st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)), ncols=c))
    return mats


@SETTINGS
@given(chain())
def test_matmul_associative(abc):
    a, b, c = abc
    assert (a @ b) @ c == a @ (b @ c)


@SETTINGS
@given(chain())
def test_transpose_of_product(abc):
    a, b, _ = abc
    assert transpose(matmul(a, b)) == matmul(transpose(b), transpose(a))


@SETTINGS
@given(matrices())
def test_oracle_transpose_invariant(a):
    assert rank_oracle(a) == rank_oracle(transpose(a))


@SETTINGS
@given(low_rank())
def test_ranks_consistent(a):
    r = rank_oracle(a)
    assert rref(a).rank == rref(transpose(a)).rank == ulv(a).rank == urv(a).rank == r
    assert cr_decompose(a).rank == cur_decompose(a).rank == r


@SETTINGS
@given(low_rank(), st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_rank_invariant_under_row_operations(a, coeffs):
    # adding multiples of row 0 to the others never changes the rank
    rows = [list(r) for r in a.rows()]
    for i in range(1, len(rows)):
        rows[i] = [x + coeffs[i] * y for x, y in zip(rows[i], rows[0])]
    assert rank(Matrix(rows, ncols=a.ncols)) == rank(a)


@SETTINGS
@given(low_rank())
def test_rref_idempotent_and_unique(a):
    r0 = rref(a).r0
    assert rref(r0).r0 == r0
    # invertible row mixing leaves the RREF unchanged
    m = a.nrows
    mix = Matrix([[1 if i == j else (2 if j == i + 1 else 0) for j in range(m)] for i in range(m)], ncols=m)
    assert rref(mix @ a).r0 == r0


@SETTINGS
@given(low_rank())
def test_subspace_dimensions(a):
    s = four_subspaces(a)
    m, n = a.shape
    assert s.rank + s.null_basis.ncols == n and s.rank + s.left_null_basis.ncols == m
    assert all(s.check(a).values())


@SETTINGS
@given(low_rank())
def test_qr_of_tall_part(a):
    if a.nrows < a.ncols:
        a = transpose(a)
    f = qr(a, "full")
    assert f.q @ f.r == a
    assert f.q.T @ f.q == Matrix.diag(f.sq_norms, True)


@SETTINGS
@given(matrices(max_dim=5), st.integers(1, 12))
def test_parse_write_roundtrip(a, denom):
    scaled = a.scale(Fraction(1, denom))
    assert parse_matrix_market_text(format_matrix_market(scaled)) == scaled
    assert parse_csv_text(format_csv(scaled)) == scaled


@SETTINGS
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=8))
def test_float_roundtrip(values):
    a = Matrix([values], exact=False)
    assert parse_matrix_market_text(format_matrix_market(a)) == a
