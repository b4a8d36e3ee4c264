import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import naive_matmul
from synstrip import tensor
from synstrip.errors import ShapeError


def test_matmul_identity():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(tensor.matmul(np.eye(2), a), a)


def test_matmul_row_by_column():
    assert tensor.matmul(np.array([[1.0, 2.0]]), np.array([[3.0], [4.0]])).tolist() == [[11.0]]


def test_matmul_matches_triple_loop():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=(5, 4)), rng.normal(size=(4, 3))
    expected = np.array(naive_matmul(a.tolist(), b.tolist()))
    np.testing.assert_allclose(tensor.matmul(a, b), expected, rtol=0, atol=1e-12)


def test_matmul_shape_error_names_shapes():
    with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 3\)"):
        tensor.matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_hadamard():
    assert tensor.hadamard(np.array([[1.0, 2.0]]), np.array([[0.0, 1.0]])).tolist() == [[0.0, 2.0]]
    a = np.random.default_rng(0).normal(size=(3, 4))
    np.testing.assert_array_equal(tensor.hadamard(a, np.ones_like(a)), a)
    np.testing.assert_array_equal(tensor.hadamard(a, np.zeros_like(a)), np.zeros_like(a))
    with pytest.raises(ShapeError):
        tensor.hadamard(a, np.ones((4, 3)))


def test_no_broadcasting():
    with pytest.raises(ShapeError):
        tensor.add(np.ones((2, 3)), np.ones((1, 3)))
    with pytest.raises(ShapeError):
        tensor.sub(np.ones((2, 3)), np.ones((2, 1)))
    with pytest.raises(ShapeError):
        tensor.add_row(np.ones((2, 3)), np.ones(2))


def test_transpose_and_involution():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert tensor.transpose(a).tolist() == [[1.0, 3.0], [2.0, 4.0]]
    np.testing.assert_array_equal(tensor.transpose(tensor.transpose(a)), a)


def test_argmax_rows_ties_to_lowest():
    assert tensor.argmax_rows(np.array([[0.2, 0.5, 0.3]])).tolist() == [1]
    assert tensor.argmax_rows(np.array([[0.5, 0.5, 0.1], [1.0, 2.0, 2.0]])).tolist() == [0, 1]


def test_row_sum_and_scale():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert tensor.row_sum(a).tolist() == [4.0, 6.0]
    assert tensor.scale(a, 0.5).tolist() == [[0.5, 1.0], [1.5, 2.0]]
    assert tensor.add_row(a, np.array([1.0, -1.0])).tolist() == [[2.0, 1.0], [4.0, 3.0]]


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31))
def test_matmul_associative(m, k, n, p, seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.normal(size=(m, k)), rng.normal(size=(k, n)), rng.normal(size=(n, p))
    left = tensor.matmul(tensor.matmul(a, b), c)
    right = tensor.matmul(a, tensor.matmul(b, c))
    np.testing.assert_allclose(left, right, rtol=1e-9, atol=1e-9 * np.abs(left).max())


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31))
def test_transpose_of_product(m, k, n, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(m, k)), rng.normal(size=(k, n))
    np.testing.assert_allclose(tensor.transpose(tensor.matmul(a, b)),
                               tensor.matmul(tensor.transpose(b), tensor.transpose(a)), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (4, 3), elements=finite), arrays(np.float64, (3, 2), elements=finite))
def test_deterministic_and_finite(a, b):
    first, second = tensor.matmul(a, b), tensor.matmul(a.copy(), b.copy())
    assert first.tobytes() == second.tobytes()
    assert np.all(np.isfinite(first))
