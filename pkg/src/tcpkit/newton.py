"""Batched damped Newton iteration for many starting points at once."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

RUNNING, CONVERGED, EXITED, STALLED = -1, 0, 1, 2


@dataclass
class NewtonBatch:
    x: np.ndarray
    residual: np.ndarray
    status: np.ndarray
    iterations: int

    @property
    def converged(self) -> np.ndarray:
        return self.status == CONVERGED


def newton_step(J: np.ndarray, G: np.ndarray, rcond: float = 1e-13) -> np.ndarray:
    """Least-squares Newton direction -pinv(J) G for a stack of systems."""
    return -np.einsum("kij,kj->ki", np.linalg.pinv(J, rcond=rcond), G)


def newton_batch(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    X0: np.ndarray,
    tol: float,
    max_iter: int = 100,
    inside: Callable[[np.ndarray], np.ndarray] | None = None,
    max_halvings: int = 12,
) -> NewtonBatch:
    """Damped Newton from every row of ``X0``.

    Steps backtrack on the sup-norm residual; when no halving decreases it
    the full step is taken anyway, so starts away from any root drift out of
    the region instead of parking at a local minimum. Rows leaving ``inside``
    are marked EXITED.
    """
    X = np.array(X0, dtype=float)
    k = X.shape[0]
    status = np.full(k, RUNNING)
    if k == 0:
        return NewtonBatch(X, np.zeros(0), status, 0)
    G = fun(X)
    res = np.max(np.abs(G), axis=1)
    it = 0
    for it in range(1, max_iter + 1):
        run = status == RUNNING
        status[run & (res <= tol)] = CONVERGED
        if inside is not None:
            run = status == RUNNING
            status[run & ~inside(X)] = EXITED
        run = np.flatnonzero(status == RUNNING)
        if run.size == 0:
            break
        Xa, Ga, ra = X[run], G[run], res[run]
        D = newton_step(jac(Xa), Ga)
        t = np.ones(run.size)
        Xn = Xa + D
        Gn = fun(Xn)
        rn = np.max(np.abs(Gn), axis=1)
        for _ in range(max_halvings):
            bad = ~(rn <= (1 - 1e-4 * t) * ra)
            if not bad.any():
                break
            t[bad] *= 0.5
            Xn[bad] = Xa[bad] + t[bad, None] * D[bad]
            Gn[bad] = fun(Xn[bad])
            rn[bad] = np.max(np.abs(Gn[bad]), axis=1)
        bad = ~(rn <= ra)
        if bad.any():
            Xn[bad] = Xa[bad] + D[bad]
            Gn[bad] = fun(Xn[bad])
            rn[bad] = np.max(np.abs(Gn[bad]), axis=1)
        finite = np.all(np.isfinite(Xn), axis=1) & np.isfinite(rn)
        X[run[finite]], G[run[finite]], res[run[finite]] = Xn[finite], Gn[finite], rn[finite]
        status[run[~finite]] = EXITED
    run = status == RUNNING
    status[run & (res <= tol)] = CONVERGED
    # rounding floor: residuals a little above tol after max_iter still count
    status[(status == RUNNING) & (res <= 1e3 * tol)] = CONVERGED
    status[status == RUNNING] = STALLED
    return NewtonBatch(X, res, status, it)


def cell_grid(lo: float, hi: float, per_axis: int, dim: int) -> np.ndarray:
    """Cell-centred grid on [lo, hi]^dim; no point lies on a face, so boxes with a corner at 0 avoid x = 0."""
    axis = lo + (np.arange(per_axis) + 0.5) * (hi - lo) / per_axis
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def dedupe(points, tol: float) -> list[np.ndarray]:
    """Sort lexicographically, then keep points at sup-distance > tol from every kept one."""
    pts = sorted((np.asarray(p, dtype=float) for p in points), key=lambda p: tuple(p))
    kept: list[np.ndarray] = []
    for p in pts:
        if all(np.max(np.abs(p - q)) > tol for q in kept):
            kept.append(p)
    return kept
