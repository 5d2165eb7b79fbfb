"""Tensor class membership tests with certificates.

For Z-tensors the strong-M property is decided from a certified spectral
interval, and the other equivalent conditions (S-tensor, strict
semi-monotonicity, extended P, Q) either inherit that verdict or carry their
own directly checkable certificate. Sampled checks only ever refute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .spectral import DEFAULT_TOL, spectral_radius
from .tensor import (
    NotZTensorError,
    Tensor,
    ZDecomposition,
    contract,
    contract_many,
    first_positive_offdiagonal,
    quad_form,
    z_decompose,
)
from .verdict import PropertyVerdict, jsonable, one_based

# relative slack demanded of "strictly positive" floating-point certificates
CERT_MARGIN = 1e-12


def is_z(A: Tensor) -> PropertyVerdict:
    bad = first_positive_offdiagonal(A)
    if bad is None:
        return PropertyVerdict("z", "true", "exact", {})
    return PropertyVerdict("z", "false", "exact", {"index": one_based(bad), "value": float(A.data[bad])})


def is_strong_m(A: Tensor, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Compare r with the certified bracket on rho(B); also reports the (weak) M verdict."""
    z = is_z(A)
    if not z.holds:
        return PropertyVerdict("strong_m", "false", "exact", {"z": z.to_dict(), "weak_m": "false"})
    dec = z_decompose(A)
    est = spectral_radius(dec.B, tol)
    r = dec.r
    if r > est.upper:
        status = "true"
    elif r <= est.lower:
        status = "false"
    else:
        status = "unknown"
    if r >= est.upper:
        weak = "true"
    elif r < est.lower:
        weak = "false"
    else:
        weak = "unknown"
    cert = {
        "r": r,
        "rho": est.rho,
        "lower": est.lower,
        "upper": est.upper,
        "converged": est.converged,
        "perron_vector": est.vector,
        "weak_m": weak,
    }
    return PropertyVerdict("strong_m", status, "spectral", cert)


def _abs_contract(A: Tensor, x: np.ndarray) -> np.ndarray:
    return contract(Tensor(np.abs(A.data)), x)


def _certified_positive(A: Tensor, d: np.ndarray) -> bool:
    """d > 0 and A d^{m-1} > 0 with room for rounding in the contraction."""
    if np.any(d <= 0):
        return False
    return bool(np.all(contract(A, d) > CERT_MARGIN * _abs_contract(A, d)))


def nonpositive_witness(A: Tensor, x) -> np.ndarray | None:
    """A nonzero x >= 0 with (A x^{m-1})_i <= 0 on its support, if a top-k truncation of x is one.

    For a Z-tensor such an x shows that no d > 0 has A d^{m-1} > 0: the ratios
    of B on the support are all >= r, so rho(B) >= r by the max-min formula.
    """
    x = np.asarray(x, dtype=float)
    order = np.argsort(-x, kind="stable")
    absA = Tensor(np.abs(A.data))
    for k in range(A.dim, 0, -1):
        keep = order[:k]
        if x[keep[-1]] <= 0:
            continue
        y = np.zeros_like(x)
        y[keep] = x[keep]
        Fy = contract(A, y)[keep]
        if np.all(Fy <= -CERT_MARGIN * contract(absA, y)[keep]):
            return y
    return None


def find_positive_d(A: Tensor, tol: float = DEFAULT_TOL, max_iter: int = 10_000) -> PropertyVerdict:
    """Search for d > 0 with A d^{m-1} > 0 (the S-tensor property) on a Z-tensor.

    Runs d <- ((B d^{m-1} + e) / r)^[1/(m-1)] from d = e, which converges to the
    solution of A d^{m-1} = e when A is a strong M-tensor and blows up along a
    Perron direction otherwise; the blow-up direction is returned as a
    refutation witness when it checks out.
    """
    dec = z_decompose(A)
    n, m = A.dim, A.order
    rows = A.data.reshape(n, -1)
    dead = np.flatnonzero(np.all(rows <= 0, axis=1))
    if dead.size:
        return PropertyVerdict("s", "false", "exact", {"row": int(dead[0]) + 1})
    r, B = dec.r, dec.B
    e = np.ones(n)
    d = e.copy()
    for k in range(max_iter + 1):
        if _certified_positive(A, d):
            return PropertyVerdict("s", "true", "exact", {"d": d, "Ad": contract(A, d), "iterations": k})
        witness = nonpositive_witness(A, d / d.max())
        if witness is not None:
            return PropertyVerdict("s", "false", "exact", {"witness": witness, "Ax": contract(A, witness), "iterations": k})
        d = ((contract(B, d) + e) / r) ** (1.0 / (m - 1))
        if d.max() > 1e100:
            d = d / d.max() * 1e100
    return PropertyVerdict("s", "unknown", "exact", {"d": d, "iterations": max_iter})


def search_positive_d(A: Tensor, samples: int = sampling.DEFAULT_SAMPLES, seed: int = sampling.DEFAULT_SEED) -> PropertyVerdict:
    """S-tensor search for tensors outside the Z class; a hit is an exact certificate."""
    pts = sampling.simplex_points(A.dim, samples, seed)
    pts = pts[np.all(pts > 0, axis=1)]
    for d in pts:
        if _certified_positive(A, d):
            return PropertyVerdict("s", "true", "exact", {"d": d, "Ad": contract(A, d)})
    return PropertyVerdict("s", "unknown", "sampled", {"samples": len(pts)})


def _first_nonpositive(values: np.ndarray) -> int | None:
    hits = np.flatnonzero(values <= 0)
    return int(hits[0]) if hits.size else None


def check_semimonotone_conditions(A: Tensor, mode: str | None = None, tol: float = DEFAULT_TOL,
                                  samples: int = sampling.DEFAULT_SAMPLES, seed: int = sampling.DEFAULT_SEED,
                                  resolution: int | None = None) -> PropertyVerdict:
    """max_i x_i (A x^{m-1})_i > 0 for every nonzero x >= 0.

    ``mode="exact-z"`` uses the equivalence with strong M for Z-tensors;
    ``mode="sampled"`` looks for a violating x on the simplex.
    """
    if mode is None:
        mode = "exact-z" if is_z(A).holds else "sampled"
    if mode == "exact-z" and is_z(A).holds:
        v = is_strong_m(A, tol)
        return PropertyVerdict("semimonotone", v.status, v.method, {"via": "strong_m", "strong_m": v.certificate})
    if mode not in ("exact-z", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    X = sampling.simplex_points(A.dim, samples, seed, resolution)
    values = np.max(X * contract_many(A, X), axis=1)
    hit = _first_nonpositive(values)
    if hit is not None:
        return PropertyVerdict("semimonotone", "false", "sampled", {"witness": X[hit], "value": values[hit]})
    return PropertyVerdict("semimonotone", "unknown", "sampled", {"samples": len(X), "min_value": values.min()})


def check_copositive_definite(A: Tensor, kind: str, samples: int = sampling.DEFAULT_SAMPLES,
                              seed: int = sampling.DEFAULT_SEED) -> PropertyVerdict:
    """Strict copositivity (simplex) or positive definiteness (sphere) of x -> A x^m."""
    if kind not in ("strictly-copositive", "positive-definite"):
        raise ValueError(f"unknown kind {kind!r}")
    name = kind.replace("-", "_")
    n, m = A.dim, A.order
    if kind == "positive-definite" and m % 2 == 1:
        # A(-x)^m = -A x^m, so one of x, -x is always a witness
        x = np.ones(n)
        witness = -x if quad_form(A, x) > 0 else x
        return PropertyVerdict(name, "false", "exact", {"witness": witness, "value": quad_form(A, witness), "reason": "odd order"})
    if A.is_diagonal():
        diag = A.diag()
        if np.all(diag > 0):
            return PropertyVerdict(name, "true", "exact", {"diag": diag, "reason": "positive diagonal tensor"})
        i = int(np.flatnonzero(diag <= 0)[0])
        witness = np.eye(n)[i]
        return PropertyVerdict(name, "false", "exact", {"witness": witness, "value": float(diag[i])})
    if kind == "strictly-copositive":
        X = sampling.simplex_points(n, samples, seed)
    else:
        X = sampling.sphere_points(n, samples, seed)
    values = np.einsum("kj,kj->k", contract_many(A, X), X)
    hit = _first_nonpositive(values)
    if hit is not None:
        return PropertyVerdict(name, "false", "sampled", {"witness": X[hit], "value": values[hit]})
    return PropertyVerdict(name, "unknown", "sampled", {"samples": len(X), "min_value": values.min()})


def sample_p_condition(A: Tensor, power: int, samples: int, seed: int) -> dict:
    X = sampling.sphere_points(A.dim, samples, seed)
    values = np.max(X**power * contract_many(A, X), axis=1)
    hit = _first_nonpositive(values)
    if hit is None:
        return {"status": "unknown", "method": "sampled", "samples": len(X)}
    return {"status": "false", "method": "sampled", "witness": X[hit], "value": values[hit]}


def is_extended_p(A: Tensor, tol: float = DEFAULT_TOL, samples: int = sampling.DEFAULT_SAMPLES,
                  seed: int = sampling.DEFAULT_SEED) -> PropertyVerdict:
    """max_i x_i^{m-1} (A x^{m-1})_i > 0 for all nonzero x; equals strong M on Z-tensors.

    The certificate also carries the P-condition max_i x_i (A x^{m-1})_i > 0,
    which is equivalent only for even order.
    """
    m = A.order
    even = m % 2 == 0
    if is_z(A).holds:
        v = is_strong_m(A, tol)
        if even:
            p_cond = {"status": v.status, "method": v.method, "via": "even order"}
        else:
            p_cond = sample_p_condition(A, 1, samples, seed)
        cert = {"via": "strong_m", "strong_m": v.certificate, "p_equivalent": even, "p_condition": p_cond}
        return PropertyVerdict("extended_p", v.status, v.method, cert)
    ext = sample_p_condition(A, m - 1, samples, seed)
    p_cond = ext if even else sample_p_condition(A, 1, samples, seed)
    cert = {"p_equivalent": even, "p_condition": p_cond}
    if ext["status"] == "false":
        cert.update(witness=ext["witness"], value=ext["value"])
    return PropertyVerdict("extended_p", ext["status"], "sampled", cert)


def gus_pattern_violation(A: Tensor) -> tuple[int, ...] | None:
    """First nonzero entry a[i, i2, ..., im] whose trailing indices are not all equal."""
    for index, _ in A.nonzero_entries():
        if len(set(index[1:])) > 1:
            return index
    return None


def gus_pattern_check(A: Tensor, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Order >= 3, only entries a[i, k, ..., k] nonzero, and strong M: a sufficient condition for GUS."""
    if A.order < 3:
        return PropertyVerdict("gus_pattern", "false", "exact", {"reason": "order < 3"})
    bad = gus_pattern_violation(A)
    if bad is not None:
        return PropertyVerdict("gus_pattern", "false", "exact",
                               {"reason": "pattern", "index": one_based(bad), "value": float(A.data[bad])})
    v = is_strong_m(A, tol)
    if not v.holds:
        return PropertyVerdict("gus_pattern", v.status, v.method, {"reason": "strong_m", "strong_m": v.certificate})
    template = [[one_based(idx), val] for idx, val in A.nonzero_entries()]
    return PropertyVerdict("gus_pattern", "true", "spectral",
                           {"template": "a[i,k,...,k]", "entries": template, "strong_m": v.certificate})


def scale_by_diagonal(A: Tensor, d) -> Tensor:
    """Entries a[i1..im] * d[i1] * ... * d[im]."""
    d = np.asarray(d, dtype=float)
    if d.shape != (A.dim,):
        raise ValueError(f"d has shape {d.shape}, expected ({A.dim},)")
    if np.any(d <= 0):
        raise ValueError("d must be strictly positive")
    out = A.data.copy()
    m = A.order
    for axis in range(m):
        shape = [1] * m
        shape[axis] = A.dim
        out = out * d.reshape(shape)
    return Tensor(out)


def dominance_margins(A: Tensor) -> np.ndarray:
    """Row margins a[i..i] - (sum_j |a[i, j...]| - a[i..i])."""
    n = A.dim
    rows = np.abs(A.data.reshape(n, -1)).sum(axis=1)
    return 2.0 * A.diag() - rows


def strict_diag_dominance(A_bar: Tensor, tol: float = 0.0) -> PropertyVerdict:
    margins = dominance_margins(A_bar)
    bad = np.flatnonzero(margins <= tol)
    cert = {"margins": margins}
    if bad.size:
        cert["row"] = int(bad[0]) + 1
        return PropertyVerdict("diag_dominant", "false", "exact", cert)
    return PropertyVerdict("diag_dominant", "true", "exact", cert)


def _scaled_margin(A: Tensor, d: np.ndarray) -> float:
    margins = dominance_margins(scale_by_diagonal(A, d))
    return float(np.min(margins / (d * d.max() ** (A.order - 1))))


def find_dominance_scaling(A: Tensor, tol: float = DEFAULT_TOL, max_iter: int = 200) -> PropertyVerdict:
    """Heuristic search for d > 0 making the scaled tensor strictly diagonally dominant.

    For a Z-tensor with positive diagonal the scaled margin of row i is
    d_i (A d^{m-1})_i, so an S-tensor certificate already does the job; the
    coordinate search only matters outside that case. Unknown is an honest
    outcome.
    """
    n = A.dim
    candidates = [np.ones(n)]
    if is_z(A).holds:
        s = find_positive_d(A, tol)
        if s.holds:
            candidates.append(np.asarray(s.certificate["d"]))
    best_d, best = None, -np.inf
    for d in candidates:
        score = _scaled_margin(A, d)
        if score > best:
            best_d, best = d, score
    steps = (2.0, 0.5, 1.1, 1 / 1.1)
    for _ in range(max_iter):
        check = strict_diag_dominance(scale_by_diagonal(A, best_d))
        if check.holds:
            return PropertyVerdict("dominance_scaling", "true", "exact", {"d": best_d, "margins": check.certificate["margins"]})
        improved = False
        for i in range(n):
            for f in steps:
                trial = best_d.copy()
                trial[i] *= f
                trial /= trial.max()
                score = _scaled_margin(A, trial)
                if score > best + 1e-15:
                    best_d, best, improved = trial, score, True
        if not improved:
            break
    check = strict_diag_dominance(scale_by_diagonal(A, best_d))
    if check.holds:
        return PropertyVerdict("dominance_scaling", "true", "exact", {"d": best_d, "margins": check.certificate["margins"]})
    return PropertyVerdict("dominance_scaling", "unknown", "exact", {"best_d": best_d, "best_margin": best})


ALL_PROPS = ("z", "m", "s", "p", "gus", "sm", "co", "pd", "q", "dd")


@dataclass
class ClassificationReport:
    verdicts: list[PropertyVerdict] = field(default_factory=list)
    decomposition: ZDecomposition | None = None
    mu: float | None = None

    def get(self, prop: str) -> PropertyVerdict | None:
        for v in self.verdicts:
            if v.property == prop:
                return v
        return None

    def consistent(self) -> bool:
        """Decided verdicts among the Z-tensor equivalents (and mu > 0) all agree."""
        if self.decomposition is None:
            return True
        keys = ("strong_m", "s", "semimonotone", "extended_p", "q")
        seen = {v.status for v in self.verdicts if v.property in keys and v.decided}
        if self.mu is not None:
            strong = self.get("strong_m")
            if strong is not None and strong.decided:
                seen.add("true" if self.mu > 0 else "false")
        return len(seen) <= 1

    def to_dict(self) -> dict:
        dec = None
        if self.decomposition is not None:
            from .io import tensor_to_dict

            dec = {"r": self.decomposition.r, "B": tensor_to_dict(self.decomposition.B)}
        return {
            "verdicts": [v.to_dict() for v in self.verdicts],
            "decomposition": dec,
            "mu": self.mu,
            "consistent": self.consistent(),
        }


def classify(A: Tensor, props=ALL_PROPS, tol: float = DEFAULT_TOL, seed: int = sampling.DEFAULT_SEED) -> ClassificationReport:
    props = tuple(props)
    unknown = set(props) - set(ALL_PROPS)
    if unknown:
        raise ValueError(f"unknown properties {sorted(unknown)}; choose from {ALL_PROPS}")
    report = ClassificationReport()
    z = is_z(A)
    if z.holds:
        report.decomposition = z_decompose(A)
        est = spectral_radius(report.decomposition.B, tol)
        if est.converged:
            report.mu = report.decomposition.r - est.rho
    for prop in props:
        if prop == "z":
            report.verdicts.append(z)
        elif prop == "m":
            report.verdicts.append(is_strong_m(A, tol))
        elif prop == "s":
            report.verdicts.append(find_positive_d(A, tol) if z.holds else search_positive_d(A, seed=seed))
        elif prop == "p":
            report.verdicts.append(is_extended_p(A, tol, seed=seed))
        elif prop == "gus":
            report.verdicts.append(gus_pattern_check(A, tol))
        elif prop == "sm":
            report.verdicts.append(check_semimonotone_conditions(A, tol=tol, seed=seed))
        elif prop == "co":
            report.verdicts.append(check_copositive_definite(A, "strictly-copositive", seed=seed))
        elif prop == "pd":
            report.verdicts.append(check_copositive_definite(A, "positive-definite", seed=seed))
        elif prop == "q":
            from .tcp import q_property_probe

            report.verdicts.append(q_property_probe(A, seed=seed, tol=tol))
        elif prop == "dd":
            report.verdicts.append(find_dominance_scaling(A, tol))
    return report


__all__ = [
    "ClassificationReport",
    "NotZTensorError",
    "check_copositive_definite",
    "check_semimonotone_conditions",
    "classify",
    "dominance_margins",
    "find_dominance_scaling",
    "find_positive_d",
    "gus_pattern_check",
    "is_extended_p",
    "is_strong_m",
    "is_z",
    "jsonable",
    "sample_p_condition",
    "scale_by_diagonal",
    "strict_diag_dominance",
]
