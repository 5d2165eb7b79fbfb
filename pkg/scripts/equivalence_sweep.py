"""Agreement of the three Z-tensor tests across the strong-M boundary.

For each scale factor c, A = c * rho(B) * I - B is strong M exactly when c > 1.
Prints, per c, how often find_positive_d, is_strong_m and the zero-only
enumeration test say true, false or unknown, and how often they disagree.
"""

from __future__ import annotations

import argparse
import json
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from tcpkit.classify import find_positive_d, is_strong_m
from tcpkit.degree import karamardian_check
from tcpkit.generate import BOUNDARY_FACTORS, random_z


@dataclass
class SweepConfig:
    per_factor: int = 25
    dims: tuple[int, ...] = (2, 3)
    orders: tuple[int, ...] = (3, 4)
    factors: tuple[float, ...] = BOUNDARY_FACTORS
    seed: int = 0


def sweep(cfg: SweepConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    rows = {}
    for c in cfg.factors:
        tally, disagree = Counter(), 0
        for _ in range(cfg.per_factor):
            A = random_z(rng, int(rng.choice(cfg.dims)), int(rng.choice(cfg.orders)), c)
            verdicts = {"s": find_positive_d(A), "strong_m": is_strong_m(A), "zero_only": karamardian_check(A)}
            for name, v in verdicts.items():
                tally[f"{name}:{v.status}"] += 1
            decided = {v.status for v in verdicts.values() if v.decided}
            disagree += len(decided) > 1
        rows[str(c)] = {"counts": dict(sorted(tally.items())), "disagreements": disagree}
    return {"config": asdict(cfg), "by_factor": rows}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--per-factor", type=int, default=SweepConfig.per_factor)
    parser.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = parser.parse_args()
    print(json.dumps(sweep(SweepConfig(per_factor=args.per_factor, seed=args.seed)), indent=2))


if __name__ == "__main__":
    main()
