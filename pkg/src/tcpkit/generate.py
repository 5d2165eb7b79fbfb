"""Random test tensors: nonnegative, Z-tensors around the strong-M boundary, and GUS-pattern tensors."""

from __future__ import annotations

import numpy as np

from .spectral import spectral_radius
from .tensor import Tensor

BOUNDARY_FACTORS = (0.5, 0.9, 1.1, 2.0)
DENSITY = 0.5


def random_nonnegative(rng: np.random.Generator, n: int, m: int, density: float = DENSITY) -> Tensor:
    """Entries U[0, 1], each kept with probability ``density``."""
    shape = (n,) * m
    return Tensor(rng.uniform(0.0, 1.0, shape) * (rng.uniform(0.0, 1.0, shape) < density))


def _identity_data(n: int, m: int, r: float) -> np.ndarray:
    data = np.zeros((n,) * m)
    for i in range(n):
        data[(i,) * m] = r
    return data


def rho_estimate(B: Tensor) -> float:
    """Spectral radius estimate, snapped to 0 when the certified lower bound is 0.

    Nilpotent B have rho = 0, and the raw estimate there is rounding noise.
    """
    est = spectral_radius(B)
    return est.rho if est.lower > 0 else 0.0


def random_z(rng: np.random.Generator, n: int, m: int, c: float, density: float = DENSITY) -> Tensor:
    """A = r I - B with B random nonnegative and r = c * rho(B)."""
    B = random_nonnegative(rng, n, m, density)
    return Tensor(_identity_data(n, m, c * rho_estimate(B)) - B.data)


def random_strong_m(rng: np.random.Generator, n: int, m: int, density: float = DENSITY) -> Tensor:
    """A = r I - B with r = c * rho(B), c drawn from [1.1, 2]; r = 1 when rho(B) = 0."""
    B = random_nonnegative(rng, n, m, density)
    rho = rho_estimate(B)
    r = rng.uniform(1.1, 2.0) * rho if rho > 0 else 1.0
    return Tensor(_identity_data(n, m, r) - B.data)


def random_gus(rng: np.random.Generator, n: int, m: int) -> Tensor:
    """Strong M-tensor whose only nonzero entries are a[i, k, ..., k]."""
    B = np.zeros((n,) * m)
    for i in range(n):
        for k in range(n):
            if i != k:
                B[(i,) + (k,) * (m - 1)] = rng.uniform(0.0, 1.0)
    rho = rho_estimate(Tensor(B))
    r = rng.uniform(1.1, 2.0) * rho if rho > 0 else 1.0
    return Tensor(_identity_data(n, m, r) - B)
