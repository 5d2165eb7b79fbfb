"""Local degree at the origin for F(x) = A x^{m-1} and the min-map, plus the zero-uniqueness checks it needs.

The degree is computed by counting: pick a small regular value p, find every
solution of map(x) = p in the ball, and add up sign det J at those solutions.
Several independent p must give the same sum before the value is reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .classify import is_strong_m, is_z
from .newton import CONVERGED, EXITED, cell_grid, dedupe, newton_batch
from .spectral import DEFAULT_TOL
from .tcp import DEDUPE_TOL, TCPInstance, enumerate_solutions, verify_solution
from .tensor import DimensionError, Tensor, contract, contract_many, jacobian, jacobian_many
from .verdict import PropertyVerdict

MAX_DEGREE_DIM = 3
MAX_DEGREE_ORDER = 5
KINK_TOL = 1e-8
DEFAULT_PROBES = 5
DEFAULT_GRID = 15
MAX_REDRAWS = 50


class PremiseError(ValueError):
    """The zero-uniqueness premise for a degree computation is missing or refuted."""


@dataclass
class DegreeResult:
    value: int | None
    regular_values_used: list[np.ndarray]
    solution_counts: list[tuple[int, int]]
    consistent: bool
    ball_radius: float
    map_kind: str = "F"
    premise: dict = field(default_factory=dict)
    rejected_values: int = 0
    boundary_margin: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "regular_values_used": [[float(v) for v in p] for p in self.regular_values_used],
            "solution_counts": [list(c) for c in self.solution_counts],
            "consistent": self.consistent,
            "ball_radius": self.ball_radius,
            "map": self.map_kind,
            "premise": self.premise,
            "rejected_values": self.rejected_values,
            "boundary_margin": self.boundary_margin,
        }


def _guard(A: Tensor, max_dim: int = MAX_DEGREE_DIM) -> None:
    if A.dim > max_dim:
        raise ValueError(f"limited to n <= {max_dim}, got n = {A.dim}")


def _face_roots(residual, jac, n: int, k: int, free: list[int], lo: float, grid: int, tol: float):
    """Gauss-Newton for residual(x) = 0 with x_k = 1, starting from a grid over [lo, 1] on ``free``."""

    def embed(Y):
        X = np.zeros((Y.shape[0], n))
        X[:, k] = 1.0
        X[:, free] = Y
        return X

    if not free:
        X = embed(np.zeros((1, 0)))
        return X[np.max(np.abs(residual(X)), axis=1) <= tol]

    def fun(Y):
        return residual(embed(Y))

    def jf(Y):
        return jac(embed(Y))[:, :, free]

    starts = cell_grid(lo, 1.0, grid, len(free))
    out = newton_batch(fun, jf, starts, tol, max_iter=100)
    return embed(out.x[out.status == CONVERGED])


def check_r0(A: Tensor, grid: int = 9, tol: float = 1e-10) -> PropertyVerdict:
    """R0: TCP(A, 0) has only the zero solution.

    Exact for strong M Z-tensors. Otherwise every support is searched on the
    face x_k = 1 of the unit sup-ball, which loses nothing because the solution
    set is a cone.
    """
    _guard(A)
    n = A.dim
    if is_z(A).holds:
        sm = is_strong_m(A)
        if sm.holds:
            return PropertyVerdict("r0", "true", sm.method, {"via": "strong_m", "strong_m": sm.certificate})
    inst = TCPInstance(A, np.zeros(n))
    for size in range(n, 0, -1):
        for support in itertools.combinations(range(n), size):
            S = list(support)

            def residual(X, S=S):
                return contract_many(A, X)[:, S]

            def jac(X, S=S):
                return jacobian_many(A, X)[:, S]

            for k in S:
                free = [i for i in S if i != k]
                for x in _face_roots(residual, jac, n, k, free, 0.0, grid, tol):
                    if np.any(x < -1e-9):
                        continue
                    x = np.maximum(x, 0.0)
                    ok, sol = verify_solution(inst, x, 1e-8)
                    if ok:
                        return PropertyVerdict("r0", "false", "sampled",
                                               {"witness": x, "w": sol.w, "support": [i + 1 for i in S]})
    return PropertyVerdict("r0", "unknown", "sampled", {"grid": grid, "supports_searched": 2**n - 1})


def check_zero_unique(A: Tensor, grid: int = 9, tol: float = 1e-10) -> PropertyVerdict:
    """F(x) = 0 only at x = 0 (over all of R^n).

    Exact for even-order strong M Z-tensors; otherwise a search over the faces
    x_k = 1 (F is odd or even, so its zero set is symmetric).
    """
    _guard(A)
    n, m = A.dim, A.order
    if m % 2 == 0 and is_z(A).holds:
        sm = is_strong_m(A)
        if sm.holds:
            return PropertyVerdict("zero_unique", "true", sm.method, {"via": "strong_m_even_order", "strong_m": sm.certificate})

    def residual(X):
        return contract_many(A, X)

    def jac(X):
        return jacobian_many(A, X)

    for k in range(n):
        free = [i for i in range(n) if i != k]
        roots = _face_roots(residual, jac, n, k, free, -1.0, grid, tol)
        if len(roots):
            x = roots[0]
            return PropertyVerdict("zero_unique", "false", "sampled", {"witness": x, "F": contract(A, x)})
    return PropertyVerdict("zero_unique", "unknown", "sampled", {"grid": grid})


def cone_search(A: Tensor, d, grid: int = 12, tol: float = 1e-12):
    """Nonzero solutions of TCP(A, d) and TCP(A, 0), searched on a compact set.

    A solution x != 0 of TCP(A, d), divided by its largest entry, is a point y
    with y_k = 1 solving TCP(A, t d) with t = max(x)^-(m-1); rays of TCP(A, 0)
    are the case t = 0. On the face y_k = 1 the entries of F(y) are bounded,
    so t <= max(|A| e^{m-1}) / min(d). Each support then gives a square
    system in (y, t) over a bounded box. Returns (witnesses, complete), each
    witness a tuple (y, t).
    """
    n, m = A.dim, A.order
    d = np.asarray(d, dtype=float)
    t_max = float(np.max(contract(Tensor(np.abs(A.data)), np.ones(n))) / np.min(d))
    t_max = max(t_max, 1e-12)
    slack = 1e-3
    witnesses, complete = [], True
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            S = list(support)
            for k in S:
                free = [i for i in S if i != k]

                def embed(Z, free=free, k=k):
                    Y = np.zeros((Z.shape[0], n))
                    Y[:, k] = 1.0
                    Y[:, free] = Z[:, :-1]
                    return Y

                def fun(Z, S=S, embed=embed):
                    return contract_many(A, embed(Z))[:, S] + Z[:, -1:] * d[S]

                def jac(Z, S=S, free=free, embed=embed):
                    J = jacobian_many(A, embed(Z))[:, S][:, :, free]
                    col = np.broadcast_to(d[S], (Z.shape[0], len(S)))[:, :, None]
                    return np.concatenate([J, col], axis=2)

                def inside(Z):
                    y_ok = np.all((Z[:, :-1] >= -slack) & (Z[:, :-1] <= 1 + slack), axis=1)
                    return y_ok & (Z[:, -1] >= -slack * t_max) & (Z[:, -1] <= t_max * (1 + slack))

                axes = [(np.arange(grid) + 0.5) / grid] * len(free) + [(np.arange(grid) + 0.5) / grid * t_max]
                starts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
                out = newton_batch(fun, jac, starts, tol * (1 + t_max), max_iter=100, inside=inside)
                if not np.all(np.isin(out.status, (CONVERGED, EXITED))):
                    complete = False
                for z in out.x[out.converged]:
                    y, t = embed(z[None, :])[0], float(z[-1])
                    if np.any(y < -1e-9) or t < -1e-9 * t_max:
                        continue
                    y, t = np.maximum(y, 0.0), max(t, 0.0)
                    if verify_solution(TCPInstance(A, t * d), y, 1e-8)[0]:
                        witnesses.append(np.append(y, t))
    return [(z[:-1], float(z[-1])) for z in dedupe(witnesses, DEDUPE_TOL)], complete


def karamardian_check(A: Tensor, d=None, grid: int = 12, tol: float = 1e-8,
                      box_radius: float | None = None) -> PropertyVerdict:
    """Zero is the only solution of both TCP(A, 0) and TCP(A, d) for the given d > 0.

    When it holds, A has the Q-property; that conclusion is attached as a
    derived verdict. Both instances are enumerated in a box, and
    :func:`cone_search` covers solutions of any size. ``true`` needs every
    search to report completeness.
    """
    n, m = A.dim, A.order
    d = np.ones(n) if d is None else np.asarray(d, dtype=float)
    if d.shape != (n,):
        raise DimensionError(f"d has shape {d.shape}, expected ({n},)")
    if not np.all(d > 0):
        raise ValueError("d must be strictly positive")
    if box_radius is None:
        box_radius = 10.0 * max(1.0, float(np.max(d)) ** (1.0 / (m - 1)))
    unknown_q = {"property": "q", "status": "unknown", "via": "karamardian"}
    runs = {}
    for label, q, radius in (("zero", np.zeros(n), 2.0), ("d", d, box_radius)):
        found = enumerate_solutions(TCPInstance(A, q), box_radius=radius, grid=grid, tol=tol)
        runs[label] = found
        nonzero = [s for s in found.solutions if np.any(s.x)]
        if nonzero:
            return PropertyVerdict("karamardian", "false", "exact",
                                   {"q": q, "witness": nonzero[0].x, "w": nonzero[0].w, "derived": unknown_q})
    witnesses, cone_complete = cone_search(A, d, grid)
    if witnesses:
        y, t = witnesses[0]
        if t > 0:
            x = y * t ** (-1.0 / (m - 1))
            q = d
        else:
            x, q = y, np.zeros(n)
        return PropertyVerdict("karamardian", "false", "exact",
                               {"q": q, "witness": x, "w": contract(A, x) + q, "derived": unknown_q})
    complete = cone_complete and all(r.complete_within_box for r in runs.values())
    cert = {
        "d": d,
        "enumerations": {k: {"solutions": len(r.solutions), "complete_within_box": r.complete_within_box,
                             "box_radius": r.box_radius} for k, r in runs.items()},
        "cone_search_complete": cone_complete,
        "derived": {"property": "q", "status": "true" if complete else "unknown", "via": "karamardian"},
    }
    return PropertyVerdict("karamardian", "true" if complete else "unknown", "exact" if complete else "sampled", cert)


def _map_functions(A: Tensor, map_kind: str):
    if map_kind == "F":
        def fun(X):
            return contract_many(A, X)

        def jac(X):
            return jacobian_many(A, X)
    elif map_kind == "Phi":
        def fun(X):
            return np.minimum(X, contract_many(A, X))

        def jac(X):
            J = jacobian_many(A, X)
            rows = X <= contract_many(A, X)
            J[rows] = np.broadcast_to(np.eye(A.dim), J.shape)[rows]
            return J
    else:
        raise ValueError(f"map_kind must be 'F' or 'Phi', got {map_kind!r}")
    return fun, jac


def _premise(A: Tensor, map_kind: str, premise: PropertyVerdict | None) -> PropertyVerdict:
    if premise is None:
        premise = check_r0(A) if map_kind == "Phi" else check_zero_unique(A)
    if premise.refuted:
        raise PremiseError(f"zero is not an isolated solution ({premise.property} refuted); degree undefined")
    return premise


def _on_kink(A: Tensor, X: np.ndarray) -> bool:
    """Some x_i = F_i(x) where the two branches of the min-map have different gradients."""
    tie = np.abs(X - contract_many(A, X)) <= KINK_TOL
    if not tie.any():
        return False
    differs = np.any(np.abs(jacobian_many(A, X) - np.eye(A.dim)) > KINK_TOL, axis=2)
    return bool(np.any(tie & differs))


def local_degree(A: Tensor, map_kind: str = "F", radius: float = 1.0, probes: int = DEFAULT_PROBES,
                 seed: int = sampling.DEFAULT_SEED, tol: float = DEFAULT_TOL, grid: int = DEFAULT_GRID,
                 premise: PropertyVerdict | None = None) -> DegreeResult:
    """Degree at 0 of F (``map_kind="F"``) or of min{x, F(x)} (``"Phi"``) over the sup-ball of ``radius``.

    Each probe p has sup-norm 0.01 * radius^(m-1), capped at half the smallest
    |map| seen on the boundary grid. A probe is redrawn when a
    solution sits on a kink of the min-map or has a near-singular Jacobian.
    """
    _guard(A)
    n, m = A.dim, A.order
    if m > MAX_DEGREE_ORDER:
        raise ValueError(f"limited to m <= {MAX_DEGREE_ORDER}, got m = {m}")
    if radius <= 0 or probes < 1:
        raise ValueError("radius and probes must be positive")
    fun, jac = _map_functions(A, map_kind)
    evidence = _premise(A, map_kind, premise)
    rng = np.random.default_rng(seed)
    starts = cell_grid(-radius, radius, grid, n)
    boundary = radius * sampling.cube_faces(n, grid)
    margin = float(np.min(np.max(np.abs(fun(boundary)), axis=1)))
    if margin <= 0.0:
        raise PremiseError("the map vanishes on the boundary of the ball; degree undefined")
    # probes must stay inside the image of the boundary's complement
    size = min(0.01 * radius ** (m - 1), 0.5 * margin)

    used, counts, rejected = [], [], 0
    while len(used) < probes:
        if rejected > MAX_REDRAWS * probes:
            raise ArithmeticError(f"could not find {probes} regular values after {rejected} redraws")
        p = rng.uniform(-1.0, 1.0, n)
        p *= size / np.max(np.abs(p))
        out = newton_batch(lambda X: fun(X) - p, jac, starts, tol * (1 + size), max_iter=200)
        roots = [x for x in out.x[out.converged] if np.max(np.abs(x)) <= radius * (1 + 1e-9)]
        roots = dedupe(roots, DEDUPE_TOL * radius)
        X = np.array(roots).reshape(-1, n)
        if map_kind == "Phi" and len(X) and _on_kink(A, X):
            rejected += 1
            continue
        dets = np.linalg.det(jac(X)) if len(X) else np.zeros(0)
        scale = np.linalg.norm(jac(X), axis=(1, 2)) ** n if len(X) else np.zeros(0)
        if np.any(np.abs(dets) <= 1e-12 * np.maximum(scale, 1e-300)):
            rejected += 1
            continue
        used.append(p)
        counts.append((len(X), int(np.sum(np.sign(dets)))))
    sums = {c[1] for c in counts}
    consistent = len(sums) == 1
    return DegreeResult(
        value=counts[0][1] if consistent else None,
        regular_values_used=used,
        solution_counts=counts,
        consistent=consistent,
        ball_radius=float(radius),
        map_kind=map_kind,
        premise=evidence.to_dict(),
        rejected_values=rejected,
        boundary_margin=margin,
    )


def _single_variable_rows(A: Tensor) -> list[int]:
    """Rows i where F_i depends on x_i alone, i.e. only the diagonal entry can be nonzero."""
    n, m = A.dim, A.order
    rows = []
    for i in range(n):
        row = A.data[i].copy()
        row[(i,) * (m - 1)] = 0.0
        if not np.any(row):
            rows.append(i)
    return rows


def solve_equation(A: Tensor, q, radius: float | None = None, grid: int = DEFAULT_GRID,
                   tol: float = 1e-12) -> list[np.ndarray]:
    """Real solutions of A x^{m-1} = q found by multistart Newton from a grid over [-R, R]^n."""
    q = np.asarray(q, dtype=float)
    n, m = A.dim, A.order
    if radius is None:
        radius = 5.0 * max(1.0, float(np.max(np.abs(q))) ** (1.0 / (m - 1)))
    starts = cell_grid(-radius, radius, grid, n)
    scale = 1 + np.max(np.abs(q))
    out = newton_batch(lambda X: contract_many(A, X) - q, lambda X: jacobian_many(A, X), starts, tol * scale, max_iter=200)
    roots = [x for x in out.x[out.converged] if np.max(np.abs(contract(A, x) - q)) <= 1e-9 * scale]
    return dedupe(roots, DEDUPE_TOL)


def surjectivity_probe(A: Tensor, q_samples: int = 16, seed: int = sampling.DEFAULT_SEED,
                       qs=None, grid: int = DEFAULT_GRID) -> PropertyVerdict:
    """Is F(x) = q solvable for every q?

    Refuted exactly when some F_i depends on x_i alone with an even power (odd
    m) or is identically zero. Established for even-order strong M Z-tensors.
    Otherwise sampled q are solved and the preimages reported.
    """
    _guard(A)
    n, m = A.dim, A.order
    for i in _single_variable_rows(A):
        a = float(A.data[(i,) * m])
        if a == 0.0 or m % 2 == 1:
            q = np.zeros(n)
            q[i] = -1.0 if a >= 0 else 1.0
            reason = "row is identically zero" if a == 0.0 else "row is a multiple of an even power of one variable"
            return PropertyVerdict("surjective", "false", "exact", {"q": q, "row": i + 1, "reason": reason})
    if qs is None:
        signs = [np.array(s, dtype=float) for s in itertools.product((1.0, -1.0), repeat=n)]
        rng = np.random.default_rng(seed)
        qs = signs + list(rng.standard_normal((q_samples, n)))
    qs = [np.asarray(q, dtype=float).reshape(n) for q in qs]
    preimages = [solve_equation(A, q, grid=grid) for q in qs]
    evidence = {
        "q": qs,
        "preimages": preimages,
        "solved": sum(1 for p in preimages if p),
        "trials": len(qs),
    }
    if m % 2 == 0 and is_z(A).holds:
        sm = is_strong_m(A)
        if sm.holds:
            return PropertyVerdict("surjective", "true", sm.method, {"via": "strong_m_even_order", **evidence})
    return PropertyVerdict("surjective", "unknown", "sampled", evidence)
