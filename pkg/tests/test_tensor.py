import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from oracles import fd_jacobian, loop_contract
from tcpkit.tensor import (
    DomainError,
    NotZTensorError,
    Tensor,
    TensorError,
    all_index_subsets,
    contract,
    contract_exact,
    contract_many,
    jacobian,
    jacobian_many,
    power_vec,
    principal_subtensor,
    quad_form,
    z_decompose,
)

shapes = st.tuples(st.integers(1, 4), st.integers(2, 4))
seeds = st.integers(0, 2**32 - 1)


def random_tensor(seed, n, m):
    return Tensor(np.random.default_rng(seed).uniform(-1, 1, (n,) * m))


# construction

def test_rejects_non_finite():
    with pytest.raises(TensorError):
        Tensor([[1.0, np.nan], [0.0, 1.0]])


def test_rejects_ragged_modes():
    with pytest.raises(TensorError):
        Tensor(np.zeros((2, 3)))


def test_rejects_order_one():
    with pytest.raises(TensorError):
        Tensor([1.0, 2.0])


def test_rejects_oversize():
    with pytest.raises(TensorError):
        Tensor.zeros(9, 10)


def test_data_is_read_only():
    A = Tensor.identity(3, 2)
    with pytest.raises(ValueError):
        A.data[0, 0, 0] = 5.0


def test_from_entries_rejects_duplicates_and_range():
    with pytest.raises(TensorError):
        Tensor.from_entries(2, 2, [((0, 0), 1.0), ((0, 0), 2.0)])
    with pytest.raises(TensorError):
        Tensor.from_entries(2, 2, [((0, 2), 1.0)])
    with pytest.raises(TensorError):
        Tensor.from_entries(3, 2, [((0, 0), 1.0)])


def test_arithmetic_and_equality():
    I = Tensor.identity(3, 2)
    assert I + I == 2 * I
    assert I - I == Tensor.zeros(3, 2)
    assert -I == (-1) * I
    assert I != Tensor.identity(2, 2)
    assert I.is_diagonal()
    assert_array_equal(I.diag(), [1.0, 1.0])


def test_nonzero_entries_row_major(ex4):
    assert [idx for idx, _ in ex4.nonzero_entries()] == [(0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 1), (1, 1, 1, 1)]


# contraction

def test_contract_identity():
    assert_array_equal(contract(Tensor.identity(4, 2), [2.0, 3.0]), [8.0, 27.0])


def test_contract_example_alpha4(ex4):
    assert_array_equal(contract(ex4, [-1.0, 1.0]), [1.0, 1.0])


def test_contract_example_alpha0(ex0):
    # frozen from loop_contract(ex0.data, (2, 1))
    assert_array_equal(contract(ex0, [2.0, 1.0]), [0.0, 1.0])
    assert_array_equal(loop_contract(ex0.data, [2.0, 1.0]), [0.0, 1.0])


def test_contract_exact_is_rational(ex4):
    assert contract_exact(ex4, [Fraction(-1), Fraction(1)]) == [Fraction(1), Fraction(1)]


def test_contract_dimension_mismatch():
    with pytest.raises(TensorError):
        contract(Tensor.identity(3, 2), [1.0, 2.0, 3.0])


@given(shapes, seeds)
def test_contract_matches_loop_oracle(shape, seed):
    n, m = shape
    A = random_tensor(seed, n, m)
    x = np.random.default_rng(seed + 1).uniform(-2, 2, n)
    assert_allclose(contract(A, x), loop_contract(A.data, x), rtol=1e-12, atol=1e-12)


@given(shapes, seeds)
def test_contract_many_matches_single(shape, seed):
    n, m = shape
    A = random_tensor(seed, n, m)
    X = np.random.default_rng(seed + 1).uniform(-2, 2, (5, n))
    assert_allclose(contract_many(A, X), np.array([contract(A, x) for x in X]), rtol=1e-12, atol=1e-12)


@given(shapes, seeds, st.floats(0.01, 100.0))
def test_homogeneity(shape, seed, t):
    n, m = shape
    A = random_tensor(seed, n, m)
    x = np.random.default_rng(seed + 1).uniform(-1, 1, n)
    assert_allclose(contract(A, t * x), t ** (m - 1) * contract(A, x), rtol=1e-12, atol=1e-12 * t ** (m - 1))


# quad form

def test_quad_form_examples(ex0):
    assert quad_form(Tensor.identity(2, 2), [1.0, 1.0]) == 2.0
    assert quad_form(ex0, [2.0, 1.0]) == 1.0
    assert quad_form(ex0, [0.0, 0.0]) == 0.0


@given(shapes, seeds)
def test_quad_form_is_inner_product(shape, seed):
    n, m = shape
    A = random_tensor(seed, n, m)
    x = np.random.default_rng(seed + 1).uniform(-1, 1, n)
    assert quad_form(A, x) == float(contract(A, x) @ x)


# componentwise powers

def test_power_vec_examples():
    assert_array_equal(power_vec([2.0, 3.0], 3), [8.0, 27.0])
    assert_array_equal(power_vec([-2.0, 3.0], 3), [-8.0, 27.0])
    assert_allclose(power_vec([4.0, 9.0], 0.5), [2.0, 3.0])


def test_power_vec_fractional_negative_base():
    with pytest.raises(DomainError):
        power_vec([-1.0, 4.0], 0.5)


# principal subtensors

def test_principal_subtensor_full_set(ex4):
    assert principal_subtensor(ex4, [0, 1]) == ex4


@pytest.mark.parametrize("index", [0, 1])
def test_principal_subtensor_singletons(ex0, index):
    sub = principal_subtensor(ex0, [index])
    assert sub == Tensor([[[[1.0]]]])


def test_principal_subtensor_bad_sets(ex0):
    with pytest.raises(TensorError):
        principal_subtensor(ex0, [])
    with pytest.raises(TensorError):
        principal_subtensor(ex0, [2])


@given(st.integers(2, 4), st.integers(2, 4), seeds)
def test_principal_subtensor_contracts_on_embedded_vectors(n, m, seed):
    A = random_tensor(seed, n, m)
    rng = np.random.default_rng(seed + 1)
    for index_set in all_index_subsets(n):
        y = rng.uniform(-1, 1, len(index_set))
        x = np.zeros(n)
        x[list(index_set)] = y
        assert_allclose(contract(principal_subtensor(A, index_set), y), contract(A, x)[list(index_set)],
                        rtol=1e-12, atol=1e-12)


def test_all_index_subsets():
    assert list(all_index_subsets(3)) == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]


# Z decomposition

def test_z_decompose_identity():
    dec = z_decompose(Tensor.identity(3, 3))
    assert dec.r == 1.0
    assert dec.B == Tensor.zeros(3, 3)


def test_z_decompose_example(ex4):
    dec = z_decompose(ex4)
    assert dec.r == 1.0
    assert dec.B == Tensor.from_entries(4, 2, [((0, 0, 0, 1), 2.0), ((0, 0, 1, 1), 4.0)])


def test_z_decompose_canonical_r():
    dec = z_decompose(Tensor(np.diag([3.0, 5.0])))
    assert dec.r == 5.0
    assert dec.B == Tensor(np.diag([2.0, 0.0]))


def test_z_decompose_shifted_and_invalid():
    A = Tensor(np.diag([3.0, 5.0]))
    assert z_decompose(A, 7.0).B == Tensor(np.diag([4.0, 2.0]))
    with pytest.raises(TensorError):
        z_decompose(A, 4.0)
    with pytest.raises(NotZTensorError, match=r"\(1, 1, 2, 2\)"):
        z_decompose(Tensor.from_entries(4, 2, [((0, 0, 1, 1), 1.0)]))


@given(shapes, seeds)
def test_decomposition_round_trip(shape, seed):
    n, m = shape
    rng = np.random.default_rng(seed)
    B = rng.uniform(0, 1, (n,) * m)
    A = Tensor(-B) + Tensor.identity(m, n) * rng.uniform(0, 3)
    dec = z_decompose(A)
    assert np.all(dec.B.data >= 0)
    assert_allclose(dec.reconstruct().data, A.data, rtol=0, atol=1e-15)


# Jacobian

def test_jacobian_matrix_case():
    M = np.array([[1.0, -2.0], [3.0, 4.0]])
    assert_array_equal(jacobian(Tensor(M), [5.0, -7.0]), M)


def test_jacobian_identity():
    assert_array_equal(jacobian(Tensor.identity(4, 2), [1.0, 1.0]), 3 * np.eye(2))


def test_jacobian_example(ex0):
    # frozen from fd_jacobian(ex0.data, (1, 1))
    assert_allclose(fd_jacobian(ex0.data, [1.0, 1.0]), [[-1.0, -2.0], [0.0, 3.0]], atol=1e-8)
    assert_allclose(jacobian(ex0, [1.0, 1.0]), [[-1.0, -2.0], [0.0, 3.0]], atol=1e-14)


@given(shapes, seeds)
def test_jacobian_matches_finite_differences(shape, seed):
    n, m = shape
    A = random_tensor(seed, n, m)
    x = np.random.default_rng(seed + 1).uniform(-2, 2, n)
    tol = 1e-6 * (1 + np.max(np.abs(x)) ** (m - 2))
    assert_allclose(jacobian(A, x), fd_jacobian(A.data, x), rtol=0, atol=tol)
    assert_allclose(jacobian_many(A, x[None, :])[0], jacobian(A, x))
