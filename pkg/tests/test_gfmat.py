import numpy as np
import pytest

import gfmat
from gfmat import FpMatrix, FpScalar


def test_rref_identity_and_zero():
    R, r, piv = gfmat.rref(np.eye(3, dtype=np.int64), 2)
    assert r == 3 and piv == [0, 1, 2]
    assert np.array_equal(R, np.eye(3))
    assert gfmat.rank(np.zeros((3, 4), dtype=np.int64), 5) == 0


def test_rank_depends_on_characteristic():
    a = np.array([[1, 1], [1, 2]])
    assert gfmat.rank(a, 3) == 2
    b = np.array([[1, 2], [2, 1]])
    assert gfmat.rank(b, 3) == 1
    assert gfmat.rank(b, 5) == 2


def test_kernel_basis_is_kernel():
    a = np.array([[1, 2, 0, 1], [0, 1, 1, 1]])
    k = gfmat.kernel_basis(a, 3)
    assert k.shape == (2, 4)
    assert not gfmat.matmul(a, k.T, 3).any()
    assert gfmat.rank(k, 3) == 2


def test_kernel_of_empty_system_is_everything():
    k = gfmat.kernel_basis(np.zeros((0, 3), dtype=np.int64), 7)
    assert np.array_equal(k, np.eye(3))


def test_solve_consistent_and_inconsistent():
    a = np.array([[1, 1], [0, 1]])
    x = gfmat.solve(a, [2, 1], 5)
    assert np.array_equal(gfmat.matmul(a, x, 5), [2, 1])
    assert gfmat.solve(np.array([[1, 1], [1, 1]]), [0, 1], 5) is None


def test_solve_matrix_multiple_rhs():
    a = np.array([[2, 1], [1, 1]])
    b = np.array([[1, 0, 3], [0, 1, 4]])
    x = gfmat.solve_matrix(a, b, 7)
    assert np.array_equal(gfmat.matmul(a, x, 7), b % 7)


def test_inverse_and_singular():
    a = np.array([[1, 2], [3, 4]])
    inv = gfmat.inverse(a, 5)
    assert np.array_equal(gfmat.matmul(a, inv, 5), np.eye(2))
    with pytest.raises(ZeroDivisionError):
        gfmat.inverse(np.array([[1, 2], [2, 4]]), 5)


def test_subspace_ops():
    a = np.array([[1, 0, 0], [0, 1, 0]])
    b = np.array([[0, 1, 0], [0, 0, 1]])
    ops = gfmat.subspace_ops(a, b, 3)
    assert ops.sum.shape[0] == 3
    assert np.array_equal(ops.intersection, [[0, 1, 0]])
    assert not ops.a_contains_b and not ops.b_contains_a
    assert gfmat.subspace_contains(a, [1, 2, 0], 3)
    assert not gfmat.subspace_contains(a, [0, 0, 1], 3)


def test_quotient_projection_kills_subspace():
    w = np.array([[1, 1, 0, 0], [0, 0, 1, 2]])
    q, c = gfmat.quotient_projection(w, 4, 3)
    assert q.shape == (2, 4)
    assert not gfmat.matmul(q, w.T, 3).any()
    assert np.array_equal(gfmat.matmul(q, c, 3), np.eye(2))


def test_modulus_validation():
    with pytest.raises(ValueError):
        FpMatrix(np.eye(2), 4)
    with pytest.raises(ValueError):
        gfmat.check_modulus(65537)


def test_fpmatrix_wrapper():
    m = FpMatrix.from_rows([[1, 2], [3, 4]], 5)
    assert m.shape == (2, 2)
    assert (m @ m.inverse()) == FpMatrix.identity(2, 5)
    assert m.T.tolist() == [[1, 3], [2, 4]]
    assert m.kernel_basis().rows == 0
    with pytest.raises(ValueError):
        m.data[0, 0] = 3


def test_scalar_arithmetic():
    a = FpScalar(3, 7)
    assert a + 5 == 1
    assert a * a.inverse() == 1
    assert (a / 3) == 1
    assert -a == 4
    assert a ** -1 == 5
    with pytest.raises(ZeroDivisionError):
        FpScalar(0, 7).inverse()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_random_matrices_rank_nullity_and_rref_idempotent(p):
    rng = np.random.default_rng(p)
    for rows, cols in [(3, 5), (6, 4), (5, 5)]:
        a = gfmat.random_matrix(rng, rows, cols, p)
        kernel = gfmat.kernel_basis(a, p)
        assert gfmat.rank(a, p) + kernel.shape[0] == cols
        assert not gfmat.matmul(a, kernel.T, p).any()
        R, _, _ = gfmat.rref(a, p)
        assert np.array_equal(gfmat.rref(R, p)[0], R)
        v = gfmat.random_matrix(rng, cols, 1, p)[:, 0]
        w = gfmat.solve(a, gfmat.matmul(a, v, p), p)
        assert np.array_equal(gfmat.matmul(a, w, p), gfmat.matmul(a, v, p))


def test_random_subspace_dimension_formula():
    rng = np.random.default_rng(11)
    p = 3
    a = gfmat.row_space(gfmat.random_matrix(rng, 3, 6, p), p)
    b = gfmat.row_space(gfmat.random_matrix(rng, 4, 6, p), p)
    total = gfmat.subspace_sum(a, b, p).shape[0]
    meet = gfmat.subspace_intersection(a, b, p).shape[0]
    assert total + meet == a.shape[0] + b.shape[0]
