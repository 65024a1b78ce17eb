#!/usr/bin/env python3
"""Single-run success rate and Split usage with the excess fixed to the planted q.

    python scripts/success_rate.py --d 200 --q 1 2 3 --n 100 --seeds 100
"""

import argparse
from collections import Counter

from nearperfect import bound, plant, solve_with_q


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--d", type=int, default=200)
    ap.add_argument("--q", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--mode", choices=("simple", "general"), default="general")
    args = ap.parse_args()

    for q in args.q:
        hits, failed, splits, excess = 0, 0, Counter(), Counter()
        for s in range(args.seeds):
            m = plant(args.d, q, args.n, s).matrix
            r = solve_with_q(m, q, seed=s, mode=args.mode)
            if r is None:
                failed += 1
                continue
            hits += r.cost <= bound(args.d, q)
            splits[r.splits] += 1
            excess[r.cost - args.d] += 1
        print(f"q={q}: {hits}/{args.seeds} met d+40q^2+2q, {failed} passes aborted")
        print(f"   splits  {dict(sorted(splits.items()))}  (cap {4 * max(q, 1)})")
        print(f"   excess  {dict(sorted(excess.items()))}")


if __name__ == "__main__":
    main()
