"""Deterministic point sets on the unit simplex and the unit sphere."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np
from scipy.stats import qmc
from scipy.special import ndtri

DEFAULT_SEED = 0x5EED
DEFAULT_SAMPLES = 4096
TARGET_GRID_POINTS = 4096


def simplex_resolution(n: int) -> int:
    """Grid steps per axis: 200 at n <= 2, shrinking so the lattice stays near 4096 points."""
    if n <= 2:
        return 200
    res = 1
    while comb(res + 1 + n - 1, n - 1) <= TARGET_GRID_POINTS:
        res += 1
    return res


def simplex_grid(n: int, resolution: int | None = None) -> np.ndarray:
    """All points k / resolution with nonnegative integer k summing to resolution."""
    res = simplex_resolution(n) if resolution is None else resolution
    if n == 1:
        return np.ones((1, 1))
    pts = []
    for bars in itertools.combinations(range(res + n - 1), n - 1):
        prev, counts = -1, []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(res + n - 2 - prev)
        pts.append(counts)
    return np.asarray(pts, dtype=float) / res


def _sobol(n: int, count: int, seed: int) -> np.ndarray:
    engine = qmc.Sobol(d=n, scramble=True, seed=seed)
    u = engine.random(count)
    return np.clip(u, 1e-12, 1 - 1e-12)


def simplex_sobol(n: int, count: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Low-discrepancy points on the simplex (uniform via normalized exponential spacings)."""
    e = -np.log(_sobol(n, count, seed))
    return e / e.sum(axis=1, keepdims=True)


def sphere_sobol(n: int, count: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> np.ndarray:
    g = ndtri(_sobol(n, count, seed))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def cube_faces(n: int, per_axis: int, signed: bool = True) -> np.ndarray:
    """Grid on the faces of the unit sup-norm ball (or its nonnegative part)."""
    lo = -1.0 if signed else 0.0
    axis = np.linspace(lo, 1.0, per_axis)
    signs = (1.0, -1.0) if signed else (1.0,)
    out = []
    for k in range(n):
        combos = list(itertools.product(axis, repeat=n - 1))
        rest = np.array(combos, dtype=float).reshape(len(combos), n - 1)
        for s in signs:
            pts = np.insert(rest, k, s, axis=1)
            out.append(pts)
    pts = np.unique(np.vstack(out), axis=0)
    return pts


def simplex_points(n: int, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                   resolution: int | None = None) -> np.ndarray:
    """Simplex lattice followed by Sobol points; the lattice comes first so vertices are tried early."""
    return np.vstack([simplex_grid(n, resolution), simplex_sobol(n, samples, seed)])


def sphere_points(n: int, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                  per_axis: int | None = None) -> np.ndarray:
    if per_axis is None:
        per_axis = max(3, int(round(TARGET_GRID_POINTS ** (1.0 / max(n - 1, 1)))))
        if n == 1:
            per_axis = 1
    faces = cube_faces(n, per_axis)
    faces = faces / np.linalg.norm(faces, axis=1, keepdims=True)
    return np.vstack([faces, sphere_sobol(n, samples, seed)])
