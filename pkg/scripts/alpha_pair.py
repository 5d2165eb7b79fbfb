"""Solution counts and preimages for the two-variable alpha tensors.

alpha = 0: TCP(A, q) for a range of q, solved by support enumeration.
alpha = 4: real preimages of q under F, showing F is not injective.
"""

from __future__ import annotations

import argparse

import numpy as np

from tcpkit.degree import solve_equation
from tcpkit.io import load_fixture
from tcpkit.tcp import TCPInstance, enumerate_solutions


def tcp_counts(qs) -> None:
    A = load_fixture("alpha0")
    print("alpha = 0, TCP(A, q)")
    for q in qs:
        found = enumerate_solutions(TCPInstance(A, q), box_radius=10.0, grid=20)
        pts = ", ".join(np.array2string(p, precision=6) for p in found.points())
        print(f"  q = {np.array2string(np.asarray(q), precision=3):>14}  {len(found.solutions)} solution(s): {pts}")


def preimages(qs) -> None:
    A = load_fixture("alpha4")
    print("alpha = 4, solutions of F(x) = q")
    for q in qs:
        roots = solve_equation(A, q)
        pts = ", ".join(np.array2string(r, precision=6) for r in roots)
        print(f"  q = {np.array2string(np.asarray(q), precision=3):>14}  {len(roots)} preimage(s): {pts}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--random", type=int, default=4, help="extra random q per study")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    extra = [q for q in rng.standard_normal((args.random, 2))]
    tcp_counts([np.array([0.0, -1.0]), np.array([1.0, 1.0]), np.array([-1.0, -1.0])] + extra)
    preimages([np.array([1.0, 1.0]), np.array([-1.0, 1.0])] + extra)


if __name__ == "__main__":
    main()
