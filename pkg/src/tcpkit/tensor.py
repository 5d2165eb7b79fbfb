"""Dense order-m, dimension-n tensors and the multilinear maps built on them.

All indices are 0-based here; the JSON file format and reports use 1-based
indices (see :mod:`tcpkit.io`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_ENTRIES = 10**8


class TensorError(ValueError):
    pass


class DimensionError(TensorError):
    """Vector length does not match the tensor dimension."""


class DomainError(TensorError):
    """Negative base raised to a fractional power."""


class NotZTensorError(TensorError):
    def __init__(self, index: tuple[int, ...], value: float):
        self.index = index
        self.value = value
        one_based = tuple(i + 1 for i in index)
        super().__init__(f"not a Z-tensor: off-diagonal entry {one_based} = {value!r} > 0")


class Tensor:
    """Immutable dense tensor with entries ``data[i1, ..., im]``.

    >>> A = Tensor.identity(4, 2)
    >>> contract(A, np.array([2.0, 3.0]))
    array([ 8., 27.])
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=float)
        if arr.ndim < 2:
            raise TensorError(f"order must be >= 2, got {arr.ndim}")
        n = arr.shape[0]
        if n < 1 or any(s != n for s in arr.shape):
            raise TensorError(f"all modes must share one dimension, got shape {arr.shape}")
        if arr.size > MAX_ENTRIES:
            raise TensorError(f"n^m = {arr.size} exceeds the dense limit {MAX_ENTRIES}")
        if not np.all(np.isfinite(arr)):
            raise TensorError("entries must be finite")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def zeros(cls, order: int, dim: int) -> Tensor:
        _check_shape(order, dim)
        return cls(np.zeros((dim,) * order))

    @classmethod
    def diagonal(cls, diag: Sequence[float], order: int) -> Tensor:
        diag = np.asarray(diag, dtype=float)
        n = diag.shape[0]
        _check_shape(order, n)
        data = np.zeros((n,) * order)
        data[(np.arange(n),) * order] = diag
        return cls(data)

    @classmethod
    def identity(cls, order: int, dim: int) -> Tensor:
        return cls.diagonal(np.ones(dim), order)

    @classmethod
    def from_entries(cls, order: int, dim: int, entries: Iterable[tuple[Sequence[int], float]]) -> Tensor:
        """Build from ``(index, value)`` pairs with 0-based indices; the rest are zero."""
        _check_shape(order, dim)
        data = np.zeros((dim,) * order)
        seen = set()
        for index, value in entries:
            index = tuple(int(i) for i in index)
            if len(index) != order:
                raise TensorError(f"index {index} has length {len(index)}, expected {order}")
            if any(i < 0 or i >= dim for i in index):
                raise TensorError(f"index {index} out of range for dimension {dim}")
            if index in seen:
                raise TensorError(f"duplicate index {index}")
            seen.add(index)
            data[index] = value
        return cls(data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def order(self) -> int:
        return self._data.ndim

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def diag(self) -> np.ndarray:
        n = self.dim
        return self._data[(np.arange(n),) * self.order].copy()

    def is_diagonal(self) -> bool:
        off = self._data.copy()
        off[(np.arange(self.dim),) * self.order] = 0.0
        return not np.any(off)

    def nonzero_entries(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """Nonzero entries in row-major index order."""
        for index in np.argwhere(self._data != 0):
            index = tuple(int(i) for i in index)
            yield index, float(self._data[index])

    def __add__(self, other: Tensor) -> Tensor:
        return Tensor(self._data + _as_tensor(other)._data)

    def __sub__(self, other: Tensor) -> Tensor:
        return Tensor(self._data - _as_tensor(other)._data)

    def __neg__(self) -> Tensor:
        return Tensor(-self._data)

    def __mul__(self, scalar: float) -> Tensor:
        return Tensor(float(scalar) * self._data)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Tensor(order={self.order}, dim={self.dim}, nnz={int(np.count_nonzero(self._data))})"


def _as_tensor(obj) -> Tensor:
    if not isinstance(obj, Tensor):
        raise TypeError(f"expected Tensor, got {type(obj).__name__}")
    return obj


def _check_shape(order: int, dim: int) -> None:
    if order < 2:
        raise TensorError(f"order must be >= 2, got {order}")
    if dim < 1:
        raise TensorError(f"dimension must be >= 1, got {dim}")
    if dim**order > MAX_ENTRIES:
        raise TensorError(f"n^m = {dim**order} exceeds the dense limit {MAX_ENTRIES}")


def _vector(A: Tensor, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != A.dim:
        raise DimensionError(f"vector of shape {x.shape} does not match dimension {A.dim}")
    return x


def contract(A: Tensor, x) -> np.ndarray:
    """F(x) = A x^{m-1}, contracting the trailing m-1 modes with x."""
    x = _vector(A, x)
    v = A.data
    for _ in range(A.order - 1):
        v = v @ x
    return np.asarray(v, dtype=float)


def contract_many(A: Tensor, X: np.ndarray) -> np.ndarray:
    """Row-wise :func:`contract` for a batch ``X`` of shape (k, n)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != A.dim:
        raise DimensionError(f"batch of shape {X.shape} does not match dimension {A.dim}")
    v = np.einsum("...j,kj->k...", A.data, X)
    for _ in range(A.order - 2):
        v = np.einsum("k...j,kj->k...", v, X)
    return v


def contract_exact(A: Tensor, x: Sequence) -> list[Fraction]:
    """F(x) in rational arithmetic; entries and x are converted exactly to Fractions."""
    if len(x) != A.dim:
        raise DimensionError(f"vector of length {len(x)} does not match dimension {A.dim}")
    xs = [Fraction(v) for v in x]
    out = [Fraction(0)] * A.dim
    for index, value in A.nonzero_entries():
        term = Fraction(value)
        for j in index[1:]:
            term *= xs[j]
        out[index[0]] += term
    return out


def quad_form(A: Tensor, x) -> float:
    """A x^m = <A x^{m-1}, x>."""
    x = _vector(A, x)
    return float(contract(A, x) @ x)


def power_vec(x, p: float) -> np.ndarray:
    """Componentwise power x^[p]; odd integer powers keep the sign."""
    x = np.asarray(x, dtype=float)
    if float(p).is_integer():
        return x ** int(p)
    if np.any(x < 0):
        raise DomainError(f"negative base with fractional exponent {p}")
    return np.power(x, p)


def principal_subtensor(A: Tensor, index_set: Sequence[int]) -> Tensor:
    """Keep entries whose indices all lie in ``index_set`` (0-based)."""
    idx = sorted(set(int(i) for i in index_set))
    if not idx:
        raise TensorError("index set must be nonempty")
    if idx[0] < 0 or idx[-1] >= A.dim:
        raise TensorError(f"index set {idx} out of range for dimension {A.dim}")
    return Tensor(A.data[np.ix_(*([idx] * A.order))])


def first_positive_offdiagonal(A: Tensor) -> tuple[int, ...] | None:
    for index in np.argwhere(A.data > 0):
        index = tuple(int(i) for i in index)
        if len(set(index)) > 1:
            return index
    return None


@dataclass(frozen=True)
class ZDecomposition:
    """A = r I - B with B entrywise nonnegative."""

    r: float
    B: Tensor

    def reconstruct(self) -> Tensor:
        return self.r * Tensor.identity(self.B.order, self.B.dim) - self.B


def z_decompose(A: Tensor, r: float | None = None) -> ZDecomposition:
    """Split a Z-tensor as r I - B; the default r is the largest diagonal entry."""
    bad = first_positive_offdiagonal(A)
    if bad is not None:
        raise NotZTensorError(bad, float(A.data[bad]))
    r_min = float(A.diag().max())
    if r is None:
        r = r_min
    elif r < r_min:
        raise TensorError(f"r = {r} is below the largest diagonal entry {r_min}; B would be negative")
    B = -A.data.copy()
    B[(np.arange(A.dim),) * A.order] += r
    B[B == 0] = 0.0  # drop negative zeros
    return ZDecomposition(float(r), Tensor(B))


def jacobian(A: Tensor, x) -> np.ndarray:
    """dF_i/dx_j, summing the derivative of every trailing mode."""
    x = _vector(A, x)
    return jacobian_many(A, x[None, :])[0]


def jacobian_many(A: Tensor, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != A.dim:
        raise DimensionError(f"batch of shape {X.shape} does not match dimension {A.dim}")
    k, n, m = X.shape[0], A.dim, A.order
    if m == 2:
        return np.broadcast_to(A.data, (k, n, n)).copy()
    J = np.zeros((k, n, n))
    for axis in range(1, m):
        w = np.moveaxis(A.data, axis, 1)
        w = np.einsum("...l,kl->k...", w, X)
        for _ in range(m - 3):
            w = np.einsum("k...l,kl->k...", w, X)
        J += w
    return J


def all_index_subsets(n: int) -> Iterator[tuple[int, ...]]:
    """Nonempty subsets of range(n), smallest first."""
    for size in range(1, n + 1):
        yield from itertools.combinations(range(n), size)
