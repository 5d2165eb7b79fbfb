"""Spectral radius of nonnegative tensors with certified Collatz-Wielandt brackets.

The power iteration runs on shifted tensors ``B + eps * E`` (``E`` all ones)
so that iterates stay strictly positive. Every bound that is reported is
evaluated on the unshifted ``B``:

* upper bounds: ``max_i (B d^{m-1})_i / d_i^{m-1}`` at a strictly positive ``d``;
* lower bounds: ``min_{x_i > 0} (B x^{m-1})_i / x_i^{m-1}`` at a nonnegative
  ``x``, which is below rho(B) by the max-min characterization. Trying the
  top-k truncations of the iterate is what lets reducible tensors converge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .tensor import Tensor, TensorError, contract, z_decompose

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
SIGMA_FRACTION = 0.25
SHIFT_LADDER = tuple(10.0 ** (-6 - 3 * k) for k in range(99)) + (0.0,)


class SpectralError(ArithmeticError):
    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(f"{message} (rho(B) in [{lower!r}, {upper!r}])")
        self.lower = lower
        self.upper = upper


class CWBounds(NamedTuple):
    lower: float
    upper: float
    zero_tensor: bool = False


@dataclass
class SpectralEstimate:
    rho: float
    lower: float
    upper: float
    vector: np.ndarray = field(repr=False)
    iterations: int
    converged: bool
    shift: float = 0.0

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "lower": self.lower,
            "upper": self.upper,
            "iterations": self.iterations,
            "converged": self.converged,
            "vector": [float(v) for v in self.vector],
        }


def _check_nonnegative(B: Tensor) -> None:
    if np.any(B.data < 0):
        raise TensorError("tensor has a negative entry; expected a nonnegative tensor")


def collatz_wielandt_bounds(B: Tensor, d) -> CWBounds:
    """Min and max of (B d^{m-1})_i / d_i^{m-1}; they bracket rho(B) for d > 0."""
    _check_nonnegative(B)
    d = np.asarray(d, dtype=float)
    if d.shape != (B.dim,):
        raise TensorError(f"d has shape {d.shape}, expected ({B.dim},)")
    if np.any(d <= 0):
        raise ValueError("d must be strictly positive")
    if not B.data.any():
        return CWBounds(0.0, 0.0, True)
    ratios = contract(B, d) / d ** (B.order - 1)
    return CWBounds(float(ratios.min()), float(ratios.max()))


def support_lower_bound(B: Tensor, x) -> float:
    """Best max-min lower bound over the top-k truncations of a nonnegative x."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(-x, kind="stable")
    best = 0.0
    for k in range(1, B.dim + 1):
        keep = order[:k]
        if x[keep[-1]] <= 0:
            break
        y = np.zeros_like(x)
        y[keep] = x[keep]
        ratios = contract(B, y)[keep] / y[keep] ** (B.order - 1)
        best = max(best, float(ratios.min()))
    return best


def _shifted_power(B: Tensor, eps: float, x: np.ndarray, tol: float, max_iter: int):
    # Iterates on B + eps*E + sigma*I; the sigma*I term has the same Perron vector
    # and damps the near-unimodular eigenvalues of cyclic blocks.
    m = B.order
    sigma = 0.0
    for k in range(1, max_iter + 1):
        y = contract(B, x) + eps * x.sum() ** (m - 1)
        if np.all(x > 0):
            ratios = y / x ** (m - 1)
            lo, hi = ratios.min(), ratios.max()
            if hi - lo <= max(1e-2 * tol, 1e-13 * hi):
                return x, k
            sigma = SIGMA_FRACTION * hi
        y = y + sigma * x ** (m - 1)
        top = y.max()
        if top <= 0:
            return x, k
        x_new = (y / top) ** (1.0 / (m - 1))
        if np.max(np.abs(x_new - x)) <= 1e-15:
            return x_new, k
        x = x_new
    return x, max_iter


def spectral_radius(B: Tensor, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SpectralEstimate:
    """Certified estimate of rho(B) for a nonnegative tensor B.

    ``max_iter`` bounds the iterations spent at each shift level.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_nonnegative(B)
    n = B.dim
    if not B.data.any():
        return SpectralEstimate(0.0, 0.0, 0.0, np.ones(n), 0, True, 0.0)
    # rho(B0 + delta I) = rho(B0) + delta and every ratio shifts by delta, so
    # strip the common diagonal part; a large shift slows the iteration down.
    delta = float(B.diag().min())
    if delta > 0:
        data = B.data.copy()
        data[(np.arange(n),) * B.order] -= delta
        est = spectral_radius(Tensor(data), tol, max_iter)
        est.rho, est.lower, est.upper = est.rho + delta, est.lower + delta, est.upper + delta
        return est

    x = np.ones(n)
    lower, upper = 0.0, np.inf
    best_x, best_shift = x, SHIFT_LADDER[0]
    iterations = 0
    for eps in SHIFT_LADDER:
        x, used = _shifted_power(B, eps, x, tol, max_iter)
        iterations += used
        if np.all(x > 0):
            cw = collatz_wielandt_bounds(B, x)
            lower = max(lower, cw.lower)
            if cw.upper < upper:
                upper, best_x, best_shift = cw.upper, x, eps
        lower = max(lower, support_lower_bound(B, x))
        if upper - lower <= tol:
            break
        if not np.all(x > 0):
            break  # the unshifted attempt lost positivity; nothing more to learn
    converged = bool(upper - lower <= tol)
    if not np.isfinite(upper):
        upper = float(np.max(B.data.reshape(n, -1).sum(axis=1)))  # row-sum bound at d = e
    lower = min(lower, upper)
    rho = 0.5 * (lower + upper)
    return SpectralEstimate(rho, lower, upper, best_x / best_x.max(), iterations, converged, best_shift)


def eigen_residual(B: Tensor, lam: float, x) -> float:
    """||B x^{m-1} - lam x^[m-1]||_inf."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("x must be nonzero")
    return float(np.max(np.abs(contract(B, x) - lam * x ** (B.order - 1))))


def mu(A: Tensor, tol: float = DEFAULT_TOL, r: float | None = None, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Smallest real part of the spectrum of a Z-tensor, computed as r - rho(B)."""
    dec = z_decompose(A, r)
    est = spectral_radius(dec.B, tol, max_iter)
    if not est.converged:
        raise SpectralError("spectral radius did not converge", est.lower, est.upper)
    return dec.r - est.rho
