#!/usr/bin/env python3
"""Wall time of ``solve`` against d at fixed q and n, with per-phase medians.

    python scripts/scaling.py --d 250 500 1000 2000 4000 --seeds 10
"""

import argparse
import statistics
import time

from nearperfect import SolverConfig, plant, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--d", type=int, nargs="+", default=[250, 500, 1000])
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--restarts", type=int, default=10)
    args = ap.parse_args()

    print(f"{'d':>6} {'median_s':>9} {'ratio':>6} {'mst':>7} {'passes':>8} {'replay':>7} {'cost-d':>7}")
    prev = None
    for d in args.d:
        total, phases, excess = [], {"mst": [], "passes": [], "replay": []}, []
        for s in range(args.seeds):
            m = plant(d, args.q, args.n, s).matrix
            t0 = time.perf_counter()
            r = solve(m, SolverConfig(seed=s, restarts_per_q=args.restarts))
            total.append(time.perf_counter() - t0)
            for k in phases:
                phases[k].append(r.timings.get(k, 0.0))
            excess.append(r.cost - d)
        med = statistics.median(total)
        ratio = f"{med / prev:6.2f}" if prev else "     -"
        prev = med
        ph = {k: statistics.median(v) for k, v in phases.items()}
        print(f"{d:>6} {med:>9.4f} {ratio} {ph['mst']:>7.4f} {ph['passes']:>8.4f} {ph['replay']:>7.4f} "
              f"{statistics.median(excess):>7}")


if __name__ == "__main__":
    main()
