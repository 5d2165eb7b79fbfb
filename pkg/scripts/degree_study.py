"""Local degree at 0 of F and of the min-map for random strong M-tensors.

Even orders should give deg F = 1 on every principal subtensor; odd orders
give deg F = 0 while the min-map keeps degree 1.
"""

from __future__ import annotations

import argparse
from collections import Counter
from dataclasses import dataclass

import numpy as np

from tcpkit.degree import PremiseError, local_degree
from tcpkit.generate import random_strong_m
from tcpkit.tensor import all_index_subsets, principal_subtensor


@dataclass
class StudyConfig:
    tensors: int = 10
    dim: int = 2
    orders: tuple[int, ...] = (3, 4)
    probes: int = 3
    seed: int = 0


def study(cfg: StudyConfig) -> dict[tuple[int, str], Counter]:
    rng = np.random.default_rng(cfg.seed)
    table: dict[tuple[int, str], Counter] = {}
    for m in cfg.orders:
        for kind in ("F", "Phi"):
            table[(m, kind)] = Counter()
        for _ in range(cfg.tensors):
            A = random_strong_m(rng, cfg.dim, m)
            for index_set in all_index_subsets(cfg.dim):
                sub = principal_subtensor(A, index_set)
                for kind in ("F", "Phi"):
                    try:
                        res = local_degree(sub, kind, probes=cfg.probes, seed=int(rng.integers(2**31)))
                        table[(m, kind)][res.value if res.consistent else "inconsistent"] += 1
                    except PremiseError:
                        table[(m, kind)]["refused"] += 1
    return table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tensors", type=int, default=StudyConfig.tensors)
    parser.add_argument("--seed", type=int, default=StudyConfig.seed)
    args = parser.parse_args()
    for (m, kind), counts in study(StudyConfig(tensors=args.tensors, seed=args.seed)).items():
        print(f"m={m} {kind:3s} " + "  ".join(f"deg {k}: {v}" for k, v in sorted(counts.items(), key=str)))


if __name__ == "__main__":
    main()
