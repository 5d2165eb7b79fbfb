"""Cross-module property suite, grouped by the theorem each group of checks exercises.

Every case is a (check, tensor, params) triple. Failures keep the tensor in
wire format together with the check name and params, so :func:`replay`
re-runs exactly the failing case.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from . import generate
from .classify import find_positive_d, gus_pattern_check, is_extended_p, is_strong_m, is_z, sample_p_condition
from .degree import check_r0, check_zero_unique, karamardian_check, local_degree, surjectivity_probe
from .io import load_fixture, tensor_from_dict, tensor_to_dict
from .spectral import collatz_wielandt_bounds, mu, spectral_radius
from .tcp import TCPInstance, enumerate_solutions, q_property_probe
from .tensor import Tensor, all_index_subsets, contract_exact, principal_subtensor, z_decompose
from .verdict import jsonable

TAGS = ("T3.1", "C3.2", "T4.1", "T4.2", "T5.1", "T5.3", "T5.4", "T5.5", "Ex5.2", "P2.2", "P2.4", "C2.3")
PASS, FAIL, SKIP = "pass", "fail", "skip"

Outcome = tuple[str, dict]


def _rng(params: dict) -> np.random.Generator:
    return np.random.default_rng(params.get("seed", 0))


def _z_only(A: Tensor) -> Outcome | None:
    z = is_z(A)
    if z.holds:
        return None
    return SKIP, {"reason": "not a Z-tensor", "is_z": z.to_dict()}


def check_cw_sandwich(B: Tensor, params: dict) -> Outcome:
    est = spectral_radius(B)
    rng = _rng(params)
    slack = 1e-9 * (1 + est.upper)
    for _ in range(params.get("count", 5)):
        d = rng.uniform(0.1, 1.0, B.dim)
        cw = collatz_wielandt_bounds(B, d)
        if not (cw.lower <= est.upper + slack and est.lower <= cw.upper + slack):
            return FAIL, {"d": d, "cw": list(cw[:2]), "interval": [est.lower, est.upper]}
    return (PASS if est.converged else FAIL), {"interval": [est.lower, est.upper]}


def check_subtensor_monotone(B: Tensor, params: dict) -> Outcome:
    full = spectral_radius(B)
    slack = 1e-9 * (1 + full.upper)
    for index_set in all_index_subsets(B.dim):
        sub = spectral_radius(principal_subtensor(B, index_set))
        if sub.lower > full.upper + slack:
            return FAIL, {"subset": [i + 1 for i in index_set], "sub": [sub.lower, sub.upper],
                          "full": [full.lower, full.upper]}
    return PASS, {}


def check_mu_identity(A: Tensor, params: dict) -> Outcome:
    skip = _z_only(A)
    if skip:
        return skip
    tol = params.get("tol", 1e-10)
    r = z_decompose(A).r
    values = [mu(A, tol)] + [mu(A, tol, r=r + s) for s in params.get("shifts", (1.0, 10.0))]
    spread = max(values) - min(values)
    return (PASS if spread <= 3 * tol else FAIL), {"mu": values, "spread": spread}


def _random_qs(params: dict, n: int) -> Iterator[np.ndarray]:
    rng = _rng(params)
    for _ in range(params.get("trials", 3)):
        yield rng.standard_normal(n)


def check_degree_existence(A: Tensor, params: dict) -> Outcome:
    premise = check_r0(A)
    if premise.refuted:
        return SKIP, {"reason": "R0 refuted", "r0": premise.to_dict()}
    deg = local_degree(A, "Phi", premise=premise, seed=params.get("seed", 0))
    if not deg.consistent or deg.value == 0:
        return SKIP, {"reason": "degree inconsistent or zero", "degree": deg.to_dict()}
    for q in _random_qs(params, A.dim):
        if not enumerate_solutions(TCPInstance(A, q), grid=10).solutions:
            return FAIL, {"degree": deg.value, "q": q}
    return PASS, {"degree": deg.value}


def check_karamardian_q(A: Tensor, params: dict) -> Outcome:
    k = karamardian_check(A)
    if not k.holds:
        return SKIP, {"reason": "karamardian condition not established", "status": k.status}
    for q in _random_qs(params, A.dim):
        if not enumerate_solutions(TCPInstance(A, q), grid=10).solutions:
            return FAIL, {"q": q}
    return PASS, {}


def _agree(verdicts: dict) -> Outcome:
    decided = {k: v for k, v in verdicts.items() if v != "unknown"}
    detail = {"verdicts": verdicts}
    if len(decided) < 2:
        return SKIP, {"reason": "fewer than two decided verdicts", **detail}
    return (PASS if len(set(decided.values())) == 1 else FAIL), detail


def check_z_q_s_m(A: Tensor, params: dict) -> Outcome:
    skip = _z_only(A)
    if skip:
        return skip
    return _agree({"q": q_property_probe(A).status, "s": find_positive_d(A).status,
                   "strong_m": is_strong_m(A).status})


def check_z_equivalences(A: Tensor, params: dict) -> Outcome:
    skip = _z_only(A)
    if skip:
        return skip
    return _agree({"c": find_positive_d(A).status, "d": is_strong_m(A).status, "f": karamardian_check(A).status})


def check_even_strong_m(A: Tensor, params: dict) -> Outcome:
    if A.order % 2 or not is_strong_m(A).holds:
        return SKIP, {"reason": "needs even order and strong M"}
    zero = check_zero_unique(A)
    deg = local_degree(A, "F", premise=zero, seed=params.get("seed", 0))
    surj = surjectivity_probe(A, q_samples=4, seed=params.get("seed", 0))
    ok = zero.holds and deg.consistent and deg.value == 1 and surj.holds
    ok = ok and surj.certificate["solved"] == surj.certificate["trials"]
    return (PASS if ok else FAIL), {"degree": deg.value, "consistent": deg.consistent,
                                    "solved": surj.certificate.get("solved")}


def check_subtensor_degrees(A: Tensor, params: dict) -> Outcome:
    if A.order % 2 or not is_strong_m(A).holds:
        return SKIP, {"reason": "needs even order and strong M"}
    for index_set in all_index_subsets(A.dim):
        sub = principal_subtensor(A, index_set)
        zero = check_zero_unique(sub)
        deg = local_degree(sub, "F", premise=zero, seed=params.get("seed", 0), probes=3)
        if zero.refuted or not deg.consistent or deg.value != 1:
            return FAIL, {"subset": [i + 1 for i in index_set], "degree": deg.value, "zero_unique": zero.status}
    return PASS, {}


def check_odd_counterexample(A: Tensor, params: dict) -> Outcome:
    surj = surjectivity_probe(A)
    ext = is_extended_p(A)
    p_cond = ext.certificate.get("p_condition", {})
    ok = surj.refuted and surj.method == "exact" and ext.holds and p_cond.get("status") == "false"
    return (PASS if ok else FAIL), {"surjective": surj.status, "extended_p": ext.status,
                                    "p_condition": p_cond.get("status"), "witness": p_cond.get("witness")}


def check_extended_p_sampling(A: Tensor, params: dict) -> Outcome:
    """For strong M Z-tensors of any order, sampling must not refute max_i x_i^{m-1} F_i(x) > 0."""
    if not is_z(A).holds or not is_strong_m(A).holds:
        return SKIP, {"reason": "needs a strong M Z-tensor"}
    ext = is_extended_p(A)
    sampled = sample_p_condition(A, A.order - 1, 1024, params.get("seed", 0))
    ok = ext.holds and sampled["status"] != "false"
    return (PASS if ok else FAIL), {"extended_p": ext.status, "sampled": sampled["status"]}


def check_gus_uniqueness(A: Tensor, params: dict) -> Outcome:
    g = gus_pattern_check(A)
    if not g.holds:
        return SKIP, {"reason": "GUS pattern not established", "gus": g.status}
    for q in _random_qs(params, A.dim):
        found = enumerate_solutions(TCPInstance(A, q), grid=params.get("grid", 12))
        if len(found.solutions) != 1:
            return FAIL, {"q": q, "solutions": [s.x for s in found.solutions]}
    return PASS, {}


def check_alpha_pair(A: Tensor, params: dict) -> Outcome:
    """The two-variable alpha tensors: strong M, no GUS pattern, plus the alpha-specific fact."""
    detail = {"strong_m": is_strong_m(A).status, "gus": gus_pattern_check(A).status}
    ok = detail["strong_m"] == "true" and detail["gus"] == "false"
    if params["alpha"] == 0:
        found = enumerate_solutions(TCPInstance(A, [0.0, -1.0]), box_radius=10, grid=20)
        pts = sorted(tuple(s.x) for s in found.solutions)
        detail["solutions"] = pts
        ok = ok and len(pts) == 2 and np.allclose(pts, [(0.0, 1.0), (2.0, 1.0)], atol=1e-8, rtol=0)
    else:
        image = contract_exact(A, [Fraction(-1), Fraction(1)])
        detail["F(-1,1)"] = [str(v) for v in image]
        ok = ok and image == [Fraction(1), Fraction(1)]
    return (PASS if ok else FAIL), detail


CHECKS: dict[str, Callable[[Tensor, dict], Outcome]] = {
    "cw_sandwich": check_cw_sandwich,
    "subtensor_monotone": check_subtensor_monotone,
    "mu_identity": check_mu_identity,
    "degree_existence": check_degree_existence,
    "karamardian_q": check_karamardian_q,
    "z_q_s_m": check_z_q_s_m,
    "z_equivalences": check_z_equivalences,
    "even_strong_m": check_even_strong_m,
    "subtensor_degrees": check_subtensor_degrees,
    "odd_counterexample": check_odd_counterexample,
    "extended_p_sampling": check_extended_p_sampling,
    "gus_uniqueness": check_gus_uniqueness,
    "alpha_pair": check_alpha_pair,
}


@dataclass
class TagResult:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    failures: list[dict] = field(default_factory=list)
    skips: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "fail": self.failed, "skip": self.skipped,
                "failures": self.failures, "skips": self.skips}


@dataclass
class VerifyReport:
    seed: int
    n_max: int
    m_set: tuple[int, ...]
    instances: int
    tags: dict[str, TagResult] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.tags.values())

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_max": self.n_max,
            "m_set": list(self.m_set),
            "instances": self.instances,
            "ok": self.ok,
            "tags": {tag: self.tags[tag].to_dict() for tag in TAGS if tag in self.tags},
        }

    def to_json(self) -> str:
        return json.dumps(jsonable(self.to_dict()), sort_keys=True, indent=2)


def _shapes(rng: np.random.Generator, n_max: int, m_set, count: int, n_cap: int = 3, even: bool = False):
    ms = [m for m in m_set if m % 2 == 0] if even else list(m_set)
    ns = list(range(2, max(2, min(n_max, n_cap)) + 1))
    if not ms:
        return
    for _ in range(count):
        yield int(rng.choice(ns)), int(rng.choice(ms))


def _cases(tag: str, seed: int, n_max: int, m_set, instances: int, extra: list[Tensor]):
    """Yield (check, tensor, params) for one tag; randomness is keyed on (seed, tag)."""
    rng = np.random.default_rng([seed, TAGS.index(tag)])

    def sub_seed() -> int:
        return int(rng.integers(2**31))

    if tag == "P2.2":
        for n, m in _shapes(rng, n_max, m_set, instances, n_cap=4):
            yield "cw_sandwich", generate.random_nonnegative(rng, n, m), {"seed": sub_seed(), "count": 5}
    elif tag == "C2.3":
        for n, m in _shapes(rng, n_max, m_set, instances):
            yield "subtensor_monotone", generate.random_nonnegative(rng, n, m), {}
    elif tag == "P2.4":
        for k, (n, m) in enumerate(_shapes(rng, n_max, m_set, instances, n_cap=4)):
            c = generate.BOUNDARY_FACTORS[k % 4]
            yield "mu_identity", generate.random_z(rng, n, m, c), {"tol": 1e-10, "shifts": [1.0, 10.0]}
    elif tag == "T3.1":
        for n, m in _shapes(rng, n_max, m_set, instances, n_cap=2):
            yield "degree_existence", generate.random_strong_m(rng, n, m), {"seed": sub_seed(), "trials": 3}
        yield "degree_existence", load_fixture("identity_m4"), {"seed": 1, "trials": 3}
    elif tag == "C3.2":
        for n, m in _shapes(rng, n_max, m_set, instances):
            yield "karamardian_q", generate.random_strong_m(rng, n, m), {"seed": sub_seed(), "trials": 3}
    elif tag in ("T4.1", "T4.2"):
        check = "z_q_s_m" if tag == "T4.1" else "z_equivalences"
        for k, (n, m) in enumerate(_shapes(rng, n_max, m_set, instances)):
            c = generate.BOUNDARY_FACTORS[k % 4]
            yield check, generate.random_z(rng, n, m, c), {"c": c}
        for A in extra:
            yield check, A, {"injected": True}
    elif tag == "T5.1":
        for n, m in _shapes(rng, n_max, m_set, instances, n_cap=2, even=True):
            yield "even_strong_m", generate.random_strong_m(rng, n, m), {"seed": sub_seed()}
    elif tag == "T5.3":
        for n, m in _shapes(rng, n_max, m_set, instances, n_cap=2, even=True):
            yield "subtensor_degrees", generate.random_strong_m(rng, n, m), {"seed": sub_seed()}
    elif tag == "T5.4":
        yield "odd_counterexample", load_fixture("odd_scalar_m3"), {}
        for n, m in _shapes(rng, n_max, m_set, instances):
            yield "extended_p_sampling", generate.random_strong_m(rng, n, m), {"seed": sub_seed()}
    elif tag == "T5.5":
        for n, m in _shapes(rng, n_max, m_set, instances, n_cap=2):
            if m >= 3:
                yield "gus_uniqueness", generate.random_gus(rng, n, m), {"seed": sub_seed(), "trials": 5}
        yield "gus_uniqueness", load_fixture("gus_pattern"), {"seed": 7, "trials": 5}
    elif tag == "Ex5.2":
        yield "alpha_pair", load_fixture("alpha0"), {"alpha": 0}
        yield "alpha_pair", load_fixture("alpha4"), {"alpha": 4}


def run_check(check: str, A: Tensor, params: dict) -> Outcome:
    return CHECKS[check](A, params)


def run_verify(seed: int = 0, n_max: int = 3, m_set=(3, 4), instances: int = 4,
               extra: list[Tensor] | None = None, tags=TAGS) -> VerifyReport:
    """Run the suite; the report is a pure function of the arguments."""
    m_set = tuple(int(m) for m in m_set)
    if n_max < 2 or any(m < 2 for m in m_set) or instances < 0:
        raise ValueError("need n_max >= 2, every m >= 2 and instances >= 0")
    report = VerifyReport(seed, n_max, m_set, instances)
    for tag in TAGS:
        if tag not in tags:
            continue
        result = TagResult()
        for check, A, params in _cases(tag, seed, n_max, m_set, instances, list(extra or [])):
            status, detail = run_check(check, A, params)
            record = {"tag": tag, "check": check, "params": params, "tensor": tensor_to_dict(A),
                      "detail": jsonable(detail)}
            if status == PASS:
                result.passed += 1
            elif status == FAIL:
                result.failed += 1
                result.failures.append(record)
            else:
                result.skipped += 1
                result.skips.append(record)
        report.tags[tag] = result
    return report


def replay(record: dict) -> Outcome:
    """Re-run the case stored in a failure (or skip) record."""
    return run_check(record["check"], tensor_from_dict(record["tensor"]), record["params"])
