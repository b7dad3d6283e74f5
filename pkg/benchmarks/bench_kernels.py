"""Compiled kernels against the numpy/Python reference on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import statistics
import time

import numpy as np

from odvote import _kernels_py as ref
from odvote.election import VotingRule, allowed_ballots
from odvote.metrics import Metric, Radius, ball_array

try:
    from odvote import _kernels as cy
except ImportError:
    cy = None


def timed(fn, repeat):
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return statistics.median(out)


def cases():
    rule = VotingRule.plurality(5)
    A = np.array(allowed_ballots(rule), dtype=np.int64)
    S = ball_array(Metric.emd(), (29, 26, 22, 17, 5), Radius.percent(17))
    levels = np.arange(len(S), dtype=np.int64) % 4
    W = ref.winners(S, A)
    centre = np.array([60, 50, 40, 30, 20], dtype=np.int64)
    m = 40
    eu, ev = (np.array(x, dtype=np.int64) for x in zip(*[(u, v) for u in range(m) for v in range(u + 1, m)]))
    ends = np.array([len(eu) // 8 * (j + 1) for j in range(8)], dtype=np.int64)
    rng = np.random.default_rng(0)
    delta = rng.integers(-1, 2, m)
    ranks = rng.permutation(m).astype(np.int64)
    return {
        f"winners ({len(S)} states x {len(A)} ballots)": lambda k: k.winners(S, A),
        "edge_levels": lambda k: k.edge_levels(W, levels, 5, 4),
        "witness_levels": lambda k: k.witness_levels(W, levels, len(A), 5, 4),
        "l1_ball (m=5, 12 units)": lambda k: k.l1_ball(centre, 12, True, 10**7),
        "od_trace (m=40, k=8)": lambda k: k.od_trace(delta, ranks, eu, ev, ends),
    }


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if cy is None:
        print("compiled extension not built; only the reference path is available")
    print(f"{'kernel':42} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fn in cases().items():
        tp = timed(lambda: fn(ref), args.repeat)
        if cy is None:
            print(f"{name:42} {tp:10.5f}")
            continue
        tc = timed(lambda: fn(cy), args.repeat)
        print(f"{name:42} {tp:10.5f} {tc:10.5f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
