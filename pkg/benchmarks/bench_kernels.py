#!/usr/bin/env python3
"""Compare the compiled vector kernels against the pure-Python twins.

Runs the scalar operations on rule-state vectors and the batch inverse
pair scan (the loop-detection inner loop), printing throughput for each
backend and the speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--pairs 400] [--repeat 5]
"""

from __future__ import annotations

import argparse
import random
import time

from flowspace._kernels import pure
from flowspace.actions import STATE_MASKS, STATE_SIZE

try:
    from flowspace._kernels import _speedups
except ImportError:
    _speedups = None


def build_workload(rng: random.Random, count: int):
    lins, trs, states = [], [], []
    for _ in range(count):
        lins.append(tuple(1 if rng.random() < 0.9 else 0 for _ in range(STATE_SIZE)))
        trs.append(tuple(rng.randint(0, m) for m in STATE_MASKS))
        states.append(tuple(rng.randint(0, m) for m in STATE_MASKS))
    # plant cancelling translations so the pair scan finds hits
    for i in range(0, count - 1, 7):
        trs[i + 1] = pure.negate(trs[i], STATE_MASKS)
        lins[i] = lins[i + 1] = (1,) * STATE_SIZE
    return lins, trs, states


def timed(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench(backend, name: str, lins, trs, states, pairs: int, repeat: int):
    n = len(lins)

    def run_compose():
        for i in range(n - 1):
            backend.compose(lins[i], trs[i], lins[i + 1], trs[i + 1], STATE_MASKS)

    def run_apply():
        for i in range(n):
            backend.apply(lins[i], trs[i], states[i], STATE_MASKS)

    def run_translate():
        for i in range(n):
            backend.translate(states[i], trs[i], STATE_MASKS)

    def run_pairs():
        backend.inverse_pairs(lins[:pairs], trs[:pairs], STATE_MASKS)

    rows = {}
    rows["compose"] = (n - 1) / timed(run_compose, repeat)
    rows["apply"] = n / timed(run_apply, repeat)
    rows["translate"] = n / timed(run_translate, repeat)
    scanned = pairs * (pairs - 1) // 2
    rows["pair-scan"] = scanned / timed(run_pairs, repeat)
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=20000,
                        help="vectors per scalar-op pass (default 20000)")
    parser.add_argument("--pairs", type=int, default=400,
                        help="entries in the pair-scan batch (default 400)")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    lins, trs, states = build_workload(rng, args.count)

    results = {"pure": bench(pure, "pure", lins, trs, states, args.pairs, args.repeat)}
    if _speedups is not None:
        # sanity: both backends agree before timing them
        for i in range(200):
            j = (i + 1) % args.count
            assert (pure.compose(lins[i], trs[i], lins[j], trs[j], STATE_MASKS)
                    == _speedups.compose(lins[i], trs[i], lins[j], trs[j], STATE_MASKS))
        assert (pure.inverse_pairs(lins[:200], trs[:200], STATE_MASKS)
                == _speedups.inverse_pairs(lins[:200], trs[:200], STATE_MASKS))
        results["compiled"] = bench(_speedups, "compiled", lins, trs, states,
                                    args.pairs, args.repeat)
    else:
        print("compiled backend not built; timing pure only")

    ops = list(results["pure"])
    print(f"{'op':<12}" + "".join(f"{b + ' (ops/s)':>18}" for b in results)
          + (f"{'speedup':>10}" if len(results) > 1 else ""))
    for op in ops:
        line = f"{op:<12}"
        for backend in results:
            line += f"{results[backend][op]:>18,.0f}"
        if len(results) > 1:
            line += f"{results['compiled'][op] / results['pure'][op]:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
