#!/usr/bin/env python3
"""Sweep the projection oracle over random rank-mixed pairs and tally the
dispatch cases against the bisection reference.

Example:
    python scripts/run_projection_sweep.py --pairs 300 --nmax 10 --seed 7
"""

import argparse
import math
import sys
from collections import Counter

import numpy as np

try:
    import threadpoolctl

    threadpoolctl.threadpool_limits(1)
except ImportError:
    pass

from projsdp.errors import CaseDUnresolved
from projsdp.linalg import symmetrize
from projsdp.projection import bisection_reference, project_psd


def random_pair(rng, nmax):
    n = int(rng.integers(2, nmax + 1))
    rank = int(rng.integers(1, n + 1))
    V, _ = np.linalg.qr(rng.normal(size=(n, n)))
    eigs = np.zeros(n)
    eigs[:rank] = rng.uniform(0.4, 2.5, size=rank)
    X = symmetrize(V @ (eigs[:, None] * V.T))
    D = symmetrize(rng.normal(size=(n, n)))
    D /= max(np.max(np.abs(D)), 1e-12)
    return X, D


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=300)
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    cases = Counter()
    worst = 0.0
    unresolved = 0
    disagreements = 0
    for _ in range(args.pairs):
        X, D = random_pair(rng, args.nmax)
        try:
            out = project_psd(X, D)
        except CaseDUnresolved:
            unresolved += 1
            continue
        cases[out.case_label] += 1
        ref = bisection_reference(X, D)
        if math.isinf(out.t_star) or math.isinf(ref):
            disagreements += math.isinf(out.t_star) != math.isinf(ref)
        else:
            err = abs(out.t_star - ref)
            worst = max(worst, err / max(1.0, out.t_star))
            disagreements += err > max(1e-6, 1e-6 * out.t_star)

    print(f"pairs: {args.pairs}  unresolved: {unresolved}")
    for label in sorted(cases):
        print(f"  case {label:<9} {cases[label]:>5}")
    print(f"worst relative step error vs reference: {worst:.2e}")
    print(f"disagreements beyond tolerance: {disagreements}")
    return 0 if disagreements == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
