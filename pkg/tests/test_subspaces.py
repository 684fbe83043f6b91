import random
from fractions import Fraction

import pytest

from rankforge import Matrix, rank_oracle, transpose
from rankforge.elimination import rank
from rankforge.subspaces import (
    NotARowBasisError,
    four_subspaces,
    prove_rank_equality_elementary,
    split_vector,
    transport_row_basis,
)

from _corpus import exact_corpus, rank_r_matrix, random_int_matrix

F = Fraction
CORPUS = exact_corpus(60, seed=83)


class TestFourSubspaces:
    def test_hand(self):
        s = four_subspaces(Matrix([[1, 2], [2, 4]]))
        assert s.rank == 1
        assert s.col_basis == Matrix([[1], [2]])
        assert s.row_basis == Matrix([[1], [2]])
        assert s.null_basis == Matrix([[-2], [1]])
        assert s.left_null_basis == Matrix([[-2], [1]])

    def test_identity(self):
        s = four_subspaces(Matrix.identity(3))
        assert s.null_basis.shape == (3, 0) and s.left_null_basis.shape == (3, 0)

    def test_zero(self):
        s = four_subspaces(Matrix.zeros(2, 3))
        assert s.rank == 0 and s.null_basis.ncols == 3 and s.left_null_basis.ncols == 2

    @pytest.mark.parametrize("a", CORPUS)
    def test_checks(self, a):
        s = four_subspaces(a)
        assert all(s.check(a).values())
        assert s.rank == rank_oracle(a)

    def test_float(self):
        a = rank_r_matrix(random.Random(89), 7, 6, 3).to_float()
        s = four_subspaces(a)
        assert s.rank == 3 and all(s.check(a).values())


class TestTransport:
    def test_hand(self):
        a = Matrix([[1, 2], [2, 4]])
        assert transport_row_basis(a, Matrix([[1], [2]])) == Matrix([[5], [10]])

    def test_dual(self):
        a = Matrix([[1, 2], [2, 4], [0, 0]])
        col = four_subspaces(a).col_basis
        image = transport_row_basis(transpose(a), col)
        assert rank(image) == 1

    def test_not_in_row_space(self):
        with pytest.raises(NotARowBasisError):
            transport_row_basis(Matrix([[1, 2], [2, 4]]), Matrix([[1], [0]]))

    def test_wrong_count(self):
        with pytest.raises(NotARowBasisError):
            transport_row_basis(Matrix.identity(2), Matrix([[1], [0]]))

    def test_wrong_length(self):
        with pytest.raises(NotARowBasisError):
            transport_row_basis(Matrix.identity(2), Matrix.identity(3))

    @pytest.mark.parametrize("a", CORPUS)
    def test_any_row_basis(self, a):
        s = four_subspaces(a)
        # a scrambled basis: row basis times a unimodular mixing matrix
        r = s.rank
        mix = Matrix([[1 if i == j else (1 if j == i + 1 else 0) for j in range(r)] for i in range(r)], ncols=r)
        image = transport_row_basis(a, s.row_basis @ mix)
        assert rank(image) == r
        assert rank(image.hstack(s.col_basis)) == r


class TestSplit:
    def test_hand(self):
        x_r, x_n = split_vector(Matrix([[1, 2], [2, 4]]), (1, 0))
        assert x_r == (F(1, 5), F(2, 5)) and x_n == (F(4, 5), F(-2, 5))

    def test_idempotent(self):
        a = Matrix([[1, 2, 3], [0, 1, 1]])
        x_r, x_n = split_vector(a, (4, -1, 7))
        assert split_vector(a, x_r) == (x_r, (0, 0, 0))
        assert split_vector(a, x_n) == ((0, 0, 0), x_n)

    def test_zero_matrix(self):
        assert split_vector(Matrix.zeros(2, 2), (3, 4)) == ((0, 0), (3, 4))

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            split_vector(Matrix.identity(2), (1, 2, 3))

    @pytest.mark.parametrize("a", CORPUS[:30])
    def test_properties(self, a):
        rng = random.Random(a.nrows * 31 + a.ncols)
        x = [rng.randint(-5, 5) for _ in range(a.ncols)]
        x_r, x_n = split_vector(a, x)
        assert tuple(p + q for p, q in zip(x_r, x_n)) == tuple(x)
        assert (a @ Matrix.column(x_n)).is_zero()
        assert sum(p * q for p, q in zip(x_r, x_n)) == 0


class TestElementaryRoute:
    def test_7x5_rank3(self):
        a = rank_r_matrix(random.Random(97), 7, 5, 3)
        e = prove_rank_equality_elementary(a, check_oracle=True)
        assert e.passed and e.row_rank == e.col_rank == 3
        assert e.checks["oracle_agrees"]

    def test_wide(self):
        a = random_int_matrix(random.Random(101), 2, 6)
        e = prove_rank_equality_elementary(a)
        assert e.passed and e.row_rank == 2

    def test_entry_dict(self, uvt):
        d = prove_rank_equality_elementary(uvt).to_dict()
        assert set(d) == {"route", "row_rank", "col_rank", "pass", "checks", "residuals", "timing_ms", "error"}
        assert d["route"] == "elementary" and d["pass"] is True
