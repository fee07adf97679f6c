import numpy as np
import pytest

from rslsq import (
    CsrMatrix,
    InvalidMatrixError,
    ShapeMismatchError,
    ZeroColumnError,
    column_norms,
    frobenius_norm,
    matvec,
    normalize_columns,
    row_squared_norms,
    transpose_matvec,
)
from rslsq.matrix import gram_dense


def random_csr(rng, m, n, density=0.2):
    dense = rng.standard_normal((m, n)) * (rng.random((m, n)) < density)
    return CsrMatrix.from_dense(dense), dense


class TestMatvec:
    def test_identity(self):
        x = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(matvec(np.eye(3), x), x)
        assert np.array_equal(matvec(CsrMatrix.identity(3), x), x)

    def test_dense_2x2(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(matvec(A, [1.0, 1.0]), [3.0, 7.0])

    def test_sparse_2x3(self):
        A = CsrMatrix.from_dense(np.array([[0.0, 5.0, 0.0], [0.0, 0.0, 2.0]]))
        assert np.array_equal(matvec(A, np.ones(3)), [5.0, 2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            matvec(np.eye(3), np.ones(4))
        with pytest.raises(ShapeMismatchError):
            matvec(CsrMatrix.identity(3), np.ones(2))

    def test_sparse_matches_dense(self):
        rng = np.random.default_rng(0)
        A, dense = random_csr(rng, 40, 17)
        x = rng.standard_normal(17)
        np.testing.assert_allclose(matvec(A, x), dense @ x, rtol=0, atol=1e-12)


class TestTransposeMatvec:
    def test_identity(self):
        y = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(transpose_matvec(np.eye(3), y), y)

    def test_dense_2x2(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(transpose_matvec(A, [1.0, 1.0]), [4.0, 6.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            transpose_matvec(np.eye(3), np.ones(4))

    def test_adjoint_identity_7x4(self):
        rng = np.random.default_rng(1)
        A = rng.standard_normal((7, 4))
        u = rng.standard_normal(4)
        v = rng.standard_normal(7)
        lhs = matvec(A, u) @ v
        rhs = u @ transpose_matvec(A, v)
        assert abs(lhs - rhs) <= 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_adjoint_identity_sparse(self, seed):
        rng = np.random.default_rng(seed)
        m, n = rng.integers(3, 60, size=2)
        A, _ = random_csr(rng, m, n)
        u = rng.standard_normal(n)
        v = rng.standard_normal(m)
        bound = 1e-10 * frobenius_norm(A) * np.linalg.norm(u) * np.linalg.norm(v)
        assert abs(matvec(A, u) @ v - u @ transpose_matvec(A, v)) <= bound


class TestNorms:
    def test_column_norms_identity(self):
        assert np.array_equal(column_norms(np.eye(2)), [1.0, 1.0])

    def test_column_norms_345(self):
        assert np.array_equal(column_norms(np.array([[3.0], [4.0]])), [5.0])

    def test_column_norms_mixed(self):
        got = column_norms(np.array([[1.0, 0.0], [1.0, 2.0]]))
        np.testing.assert_allclose(got, [np.sqrt(2.0), 2.0], rtol=1e-15)

    def test_column_norms_sparse_matches_dense(self):
        rng = np.random.default_rng(2)
        A, dense = random_csr(rng, 30, 12)
        np.testing.assert_allclose(column_norms(A), column_norms(dense), rtol=1e-14)

    def test_row_squared_norms_identity(self):
        assert np.array_equal(row_squared_norms(np.eye(2)), [1.0, 1.0])

    def test_row_squared_norms_with_zero_row(self):
        A = CsrMatrix.from_dense(np.array([[3.0, 4.0], [0.0, 0.0]]))
        assert np.array_equal(row_squared_norms(A), [25.0, 0.0])

    def test_row_squared_norms_sum_is_frobenius(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((50, 10))
        assert abs(row_squared_norms(A).sum() - frobenius_norm(A) ** 2) <= 1e-12 * frobenius_norm(A) ** 2

    def test_frobenius(self):
        assert frobenius_norm(np.eye(4)) == 2.0
        assert abs(frobenius_norm(np.array([[1.0, 2.0], [2.0, 1.0]])) - np.sqrt(10.0)) < 1e-15
        assert frobenius_norm(np.zeros((3, 3))) == 0.0
        assert frobenius_norm(CsrMatrix.from_dense(np.zeros((3, 3)))) == 0.0


class TestNormalizeColumns:
    def test_identity(self):
        scaled, d = normalize_columns(np.eye(3))
        assert np.array_equal(scaled, np.eye(3))
        assert np.array_equal(d, np.ones(3))

    def test_345_column(self):
        scaled, d = normalize_columns(np.array([[3.0], [4.0]]))
        np.testing.assert_allclose(scaled, [[0.6], [0.8]], rtol=1e-15)
        assert np.array_equal(d, [5.0])

    def test_zero_column_error_names_index(self):
        A = np.array([[1.0, 0.0, 2.0], [3.0, 0.0, 1.0]])
        with pytest.raises(ZeroColumnError) as exc:
            normalize_columns(A)
        assert exc.value.column == 1

    @pytest.mark.parametrize("seed", range(4))
    def test_unit_columns_and_frobenius(self, seed):
        rng = np.random.default_rng(seed)
        m, n = 80, 13
        for A in (rng.standard_normal((m, n)), random_csr(rng, m, n, 0.4)[0]):
            scaled, _ = normalize_columns(A)
            np.testing.assert_allclose(column_norms(scaled), np.ones(n), rtol=0, atol=1e-12)
            assert abs(frobenius_norm(scaled) ** 2 - n) <= 1e-10
            # Gram diagonal is exactly the squared column norms.
            np.testing.assert_allclose(np.diag(gram_dense(scaled)), np.ones(n), atol=1e-12)


class TestCsrInvariants:
    def test_identity_structure(self):
        A = CsrMatrix.identity(4)
        A.validate()
        assert A.nnz == 4 and A.shape == (4, 4)

    def test_explicit_zeros_dropped(self):
        A = CsrMatrix(2, 2, [0, 2, 3], [0, 1, 1], [1.0, 0.0, 2.0])
        assert A.nnz == 2
        A.validate()

    def test_from_coo_duplicate_rejected(self):
        with pytest.raises(InvalidMatrixError, match="duplicate"):
            CsrMatrix.from_coo(2, 2, [0, 0], [1, 1], [1.0, 2.0])

    def test_from_coo_unsorted_input(self):
        A = CsrMatrix.from_coo(2, 3, [1, 0, 0], [2, 2, 0], [1.0, 2.0, 3.0])
        A.validate()
        assert np.array_equal(A.to_dense(), [[3.0, 0.0, 2.0], [0.0, 0.0, 1.0]])

    def test_bad_column_order_rejected(self):
        with pytest.raises(InvalidMatrixError):
            CsrMatrix(1, 3, [0, 2], [2, 0], [1.0, 2.0])

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidMatrixError):
            CsrMatrix(1, 2, [0, 1], [5], [1.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidMatrixError):
            CsrMatrix(1, 1, [0, 1], [0], [np.inf])

    def test_immutable(self):
        A = CsrMatrix.identity(2)
        with pytest.raises(AttributeError):
            A.rows = 5
        with pytest.raises(ValueError):
            A.data[0] = 7.0

    def test_round_trip_dense(self):
        rng = np.random.default_rng(4)
        _, dense = random_csr(rng, 9, 7)
        assert np.array_equal(CsrMatrix.from_dense(dense).to_dense(), dense)
