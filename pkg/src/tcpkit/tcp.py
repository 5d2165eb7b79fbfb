"""Tensor complementarity problems: find x >= 0 with w = A x^{m-1} + q >= 0 and <x, w> = 0.

Solutions are the zeros of the min-map ``min{x, A x^{m-1} + q}``.
:func:`enumerate_solutions` is the brute-force reference: it visits all 2^n
supports and runs multistart Newton on each square polynomial system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .classify import find_positive_d, is_strong_m, is_z
from .newton import CONVERGED, EXITED, cell_grid, dedupe, newton_batch
from .spectral import DEFAULT_TOL
from .tensor import DimensionError, Tensor, contract, contract_many, jacobian, jacobian_many, z_decompose
from .verdict import PropertyVerdict

DEDUPE_TOL = 1e-6
REL_RESIDUAL_TOL = 1e-8
MAX_ENUM_DIM = 4


@dataclass(frozen=True)
class TCPInstance:
    A: Tensor
    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.shape != (self.A.dim,):
            raise DimensionError(f"q has shape {q.shape}, expected ({self.A.dim},)")
        if not np.all(np.isfinite(q)):
            raise ValueError("q must be finite")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def dim(self) -> int:
        return self.A.dim

    def w(self, x) -> np.ndarray:
        return contract(self.A, x) + self.q


@dataclass
class TCPSolution:
    x: np.ndarray
    w: np.ndarray
    residual: float
    complementarity_gap: float

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "w": [float(v) for v in self.w],
            "residual": self.residual,
            "complementarity_gap": self.complementarity_gap,
        }


@dataclass
class SolutionSet:
    solutions: list[TCPSolution] = field(default_factory=list)
    supports_examined: int = 0
    complete_within_box: bool = True
    box_radius: float = 0.0

    def points(self) -> list[np.ndarray]:
        return [s.x for s in self.solutions]

    def only_zero(self) -> bool:
        return len(self.solutions) == 1 and not np.any(self.solutions[0].x)

    def to_dict(self) -> dict:
        return {
            "solutions": [s.to_dict() for s in self.solutions],
            "supports_examined": self.supports_examined,
            "complete_within_box": self.complete_within_box,
            "box_radius": self.box_radius,
        }


def residual_phi(inst: TCPInstance, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.minimum(x, inst.w(x))


def verify_solution(inst: TCPInstance, x, tol: float = 1e-8) -> tuple[bool, TCPSolution]:
    x = np.asarray(x, dtype=float)
    w = inst.w(x)
    sol = TCPSolution(x.copy(), w, float(np.max(np.abs(np.minimum(x, w)))), float(x @ w))
    scale = (1 + np.max(np.abs(x))) * (1 + np.max(np.abs(w)))
    ok = bool(np.all(x >= -tol) and np.all(w >= -tol) and abs(sol.complementarity_gap) <= tol * scale)
    return ok, sol


def feasible_point(inst: TCPInstance, samples: int = sampling.DEFAULT_SAMPLES,
                   seed: int = sampling.DEFAULT_SEED) -> np.ndarray | None:
    """Some u >= 0 with A u^{m-1} + q >= 0, or None if the search finds nothing."""
    A, q, n, m = inst.A, inst.q, inst.dim, inst.A.order
    if np.all(q >= 0):
        return np.zeros(n)
    if is_z(A).holds:
        s = find_positive_d(A)
        if s.holds:
            d = np.asarray(s.certificate["d"])
            c = contract(A, d)
            t = max(0.0, float(np.max(-q / c))) ** (1.0 / (m - 1))
            for _ in range(60):
                u = t * d
                if np.all(inst.w(u) >= 0):
                    return u
                t = t * (1 + 1e-9) + 1e-300
        elif s.refuted:
            pass  # fall through to the search; feasibility can still hold for this q
    directions = sampling.simplex_points(n, samples, seed)
    for scale in np.geomspace(1e-2, 1e2, 21):
        U = scale * directions
        ok = np.all(contract_many(A, U) + q >= 0, axis=1)
        if ok.any():
            return U[int(np.flatnonzero(ok)[0])]
    return None


def _newton_matrix(inst: TCPInstance, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = inst.w(x)
    phi = np.minimum(x, w)
    x_rows = x <= w  # ties go to the x branch
    M = jacobian(inst.A, x)
    M[x_rows] = np.eye(inst.dim)[x_rows]
    return phi, M


def solve_newton(inst: TCPInstance, x0=None, tol: float = 1e-10, max_iter: int = 100,
                 verify_tol: float = 1e-8) -> TCPSolution | None:
    """Semismooth Newton on min{x, A x^{m-1} + q} with backtracking on the sup-norm."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = inst.dim
    x = np.ones(n) if x0 is None else np.array(x0, dtype=float)
    if x.shape != (n,):
        raise DimensionError(f"x0 has shape {x.shape}, expected ({n},)")
    phi, M = _newton_matrix(inst, x)
    res = np.max(np.abs(phi))
    for _ in range(max_iter):
        if res <= tol:
            break
        try:
            step = np.linalg.solve(M, -phi)
        except np.linalg.LinAlgError:
            try:
                step = np.linalg.solve(M + 1e-10 * np.eye(n), -phi)
            except np.linalg.LinAlgError:
                return None
        t = 1.0
        while t > 1e-14:
            trial = x + t * step
            trial_phi = residual_phi(inst, trial)
            trial_res = np.max(np.abs(trial_phi))
            if np.isfinite(trial_res) and trial_res <= (1 - 1e-4 * t) * res:
                break
            t *= 0.5
        else:
            return None
        x = trial
        phi, M = _newton_matrix(inst, x)
        res = np.max(np.abs(phi))
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e12:
            return None
    if res > tol:
        return None
    x = np.where(np.abs(x) <= tol, 0.0, x)
    ok, sol = verify_solution(inst, x, verify_tol)
    return sol if ok else None


def solve_multistart(inst: TCPInstance, starts=None, tol: float = 1e-10, max_iter: int = 100) -> TCPSolution | None:
    """First verified :func:`solve_newton` result over a deterministic list of starts."""
    n = inst.dim
    if starts is None:
        starts = [np.ones(n), np.zeros(n), 0.1 * np.ones(n), 10 * np.ones(n)]
        starts += list(cell_grid(0.0, 4.0, 4, n)) if n <= 4 else []
    for x0 in starts:
        sol = solve_newton(inst, x0, tol, max_iter)
        if sol is not None:
            return sol
    return None


def solve_tensor_equation(A: Tensor, q, tol: float = 1e-10, max_iter: int = 100_000) -> np.ndarray:
    """Least nonnegative solution of A x^{m-1} = q for a strong M-tensor A and q >= 0.

    Iterates x <- ((B x^{m-1} + q) / r)^[1/(m-1)] from x = 0; the sequence is
    nondecreasing.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (A.dim,):
        raise DimensionError(f"q has shape {q.shape}, expected ({A.dim},)")
    if np.any(q < 0):
        raise ValueError("q must be nonnegative")
    v = is_strong_m(A)
    if not v.holds:
        raise ValueError(f"A must be a strong M-tensor (strong-M verdict: {v.status})")
    dec = z_decompose(A)
    r, B, m = dec.r, dec.B, A.order
    x = np.zeros(A.dim)
    for _ in range(max_iter):
        if np.max(np.abs(contract(A, x) - q)) <= tol:
            return x
        x = ((contract(B, x) + q) / r) ** (1.0 / (m - 1))
    raise ArithmeticError(f"no convergence in {max_iter} iterations (residual {np.max(np.abs(contract(A, x) - q))!r})")


def solve_fixed_point(inst: TCPInstance, tol: float = 1e-10, max_iter: int = 100_000) -> TCPSolution | None:
    """Projected iteration x <- (max(0, B x^{m-1} - q) / r)^[1/(m-1)] for Z-tensors.

    Any fixed point solves the TCP; from x = 0 the iterates increase to the
    least solution when the problem is feasible.
    """
    dec = z_decompose(inst.A)
    r, B, m = dec.r, dec.B, inst.A.order
    if r <= 0:
        return None
    x = np.zeros(inst.dim)
    for _ in range(max_iter):
        if np.max(np.abs(residual_phi(inst, x))) <= tol:
            ok, sol = verify_solution(inst, x)
            return sol if ok else None
        x_new = (np.maximum(0.0, contract(B, x) - inst.q) / r) ** (1.0 / (m - 1))
        if not np.all(np.isfinite(x_new)) or np.max(x_new) > 1e12:
            return None
        x = x_new
    return None


def _support_system(inst: TCPInstance, support: tuple[int, ...]):
    n, S = inst.dim, list(support)

    def embed(Y):
        X = np.zeros((Y.shape[0], n))
        X[:, S] = Y
        return X

    def fun(Y):
        return (contract_many(inst.A, embed(Y)) + inst.q)[:, S]

    def jac(Y):
        return jacobian_many(inst.A, embed(Y))[:, S][:, :, S]

    return embed, fun, jac


def _polish(inst: TCPInstance, x: np.ndarray, newton_tol: float) -> np.ndarray | None:
    support = tuple(int(i) for i in np.flatnonzero(x))
    if not support:
        return np.zeros(inst.dim)
    embed, fun, jac = _support_system(inst, support)
    out = newton_batch(fun, jac, x[list(support)][None, :], newton_tol, max_iter=50)
    if out.status[0] != CONVERGED:
        return None
    return embed(out.x)[0]


def _relative_residual(inst: TCPInstance, x: np.ndarray, absA: Tensor) -> float:
    """Residual on the support relative to the size of the terms that cancel there.

    Homogeneous systems have tiny absolute residuals near 0, so an absolute
    test would accept points that are only close to the zero solution.
    """
    S = x != 0
    if not S.any():
        return 0.0
    w = inst.w(x)[S]
    scale = (contract(absA, np.abs(x)) + np.abs(inst.q))[S]
    return float(np.max(np.abs(w)) / max(float(np.max(scale)), 1e-300))


def enumerate_solutions(inst: TCPInstance, box_radius: float = 10.0, grid: int = 20, tol: float = 1e-8,
                        max_iter: int = 100) -> SolutionSet:
    """All solutions in [0, box_radius]^n found by support enumeration plus multistart Newton.

    ``complete_within_box`` is True only if every start either converged or
    left the box; it is a statement about the search, not a proof.
    """
    n = inst.dim
    if n > MAX_ENUM_DIM:
        raise ValueError(f"enumeration is limited to n <= {MAX_ENUM_DIM}, got {n}")
    if box_radius <= 0 or grid < 1:
        raise ValueError("box_radius and grid must be positive")
    newton_tol = 1e-12 * (1 + np.max(np.abs(inst.q)))
    slack = 1e-3 * box_radius
    snap = 1e-5
    result = SolutionSet(box_radius=float(box_radius))
    candidates = [np.zeros(n)]
    result.supports_examined = 1
    for size in range(1, n + 1):
        starts = cell_grid(0.0, box_radius, grid, size)
        for support in itertools.combinations(range(n), size):
            result.supports_examined += 1
            embed, fun, jac = _support_system(inst, support)

            def inside(Y):
                return np.all((Y >= -slack) & (Y <= box_radius + slack), axis=1)

            out = newton_batch(fun, jac, starts, newton_tol, max_iter=max_iter, inside=inside)
            if not np.all((out.status == CONVERGED) | (out.status == EXITED)):
                result.complete_within_box = False
            for x in embed(out.x[out.converged]):
                candidates.append(x)

    absA = Tensor(np.abs(inst.A.data))
    accepted = []
    for x in candidates:
        scale = 1 + np.max(np.abs(x))
        if np.any(x < -slack):
            continue
        tiny = (np.abs(x) <= snap * scale) & (x != 0)
        if tiny.any():
            x = np.where(tiny, 0.0, x)
            x = _polish(inst, x, newton_tol)
            if x is None:
                continue
        if np.any(x < 0) and np.all(x >= -tol):
            x = np.maximum(x, 0.0)
        if np.max(x) > box_radius * (1 + 1e-9):
            continue
        ok, _ = verify_solution(inst, x, tol)
        if ok and _relative_residual(inst, x, absA) <= REL_RESIDUAL_TOL:
            accepted.append(x)
    for x in dedupe(accepted, DEDUPE_TOL):
        result.solutions.append(verify_solution(inst, x, tol)[1])
    return result


def _infeasible_row(A: Tensor) -> int | None:
    """A row whose image is <= 0 on the nonnegative orthant; then q = -e_i is infeasible."""
    rows = A.data.reshape(A.dim, -1)
    dead = np.flatnonzero(np.all(rows <= 0, axis=1))
    return int(dead[0]) if dead.size else None


def q_property_probe(A: Tensor, trials: int = 20, seed: int = sampling.DEFAULT_SEED,
                     tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Q-property: TCP(A, q) solvable for every q.

    Exact for Z-tensors (Q is equivalent to strong M). Otherwise random q are
    tried; a provably infeasible q refutes, and anything else is unknown.
    """
    n = A.dim
    row = _infeasible_row(A)
    infeasible = None
    if row is not None:
        q = np.zeros(n)
        q[row] = -1.0
        infeasible = {"q": q, "row": row + 1, "reason": "row of A is nonpositive on the orthant"}
    if is_z(A).holds:
        v = is_strong_m(A, tol)
        cert = {"via": "strong_m", "strong_m": v.certificate}
        if infeasible is not None:
            cert["infeasible"] = infeasible
        return PropertyVerdict("q", v.status, v.method, cert)
    if infeasible is not None:
        return PropertyVerdict("q", "false", "exact", infeasible)
    rng = np.random.default_rng(seed)
    solved = 0
    for _ in range(trials):
        inst = TCPInstance(A, rng.standard_normal(n))
        sol = solve_multistart(inst)
        if sol is None and n <= MAX_ENUM_DIM:
            found = enumerate_solutions(inst, grid=8)
            sol = found.solutions[0] if found.solutions else None
        solved += sol is not None
    return PropertyVerdict("q", "unknown", "sampled", {"trials": trials, "solved": solved})
